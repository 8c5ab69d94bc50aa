#pragma once

#include <cmath>
#include <cstddef>

#include "transaxis/core.hpp"

namespace transaxis {

/// Equal-width bins partitioning [-1, 1]. Bins are right-open except the
/// last, which also holds 1. Labels are bin midpoints.
struct BinningSpec {
  double width = 0.1;

  std::size_t count() const {
    if (!(width > 0.0) || width > 2.0) throw ArgumentError("bin width must lie in (0, 2]");
    const double n = 2.0 / width;
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-9 * rounded) throw ArgumentError("bin width must divide 2 evenly");
    return static_cast<std::size_t>(rounded);
  }

  std::size_t bin_of(double score) const {
    const std::size_t n = count();
    if (!(score >= -1.0 && score <= 1.0)) throw ArgumentError("score outside [-1, 1]: " + format_real(score));
    // The nudge keeps scores sitting on an interior edge in the upper bin.
    const auto k = static_cast<long long>(std::floor((score + 1.0) / width + 1e-9));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n) - 1));
  }

  double midpoint(std::size_t k) const { return -1.0 + (static_cast<double>(k) + 0.5) * width; }
};

}  // namespace transaxis
