#pragma once

// Walker/Vose alias table for O(1) sampling from a discrete distribution.

#include <numeric>
#include <span>
#include <vector>

#include "transaxis/core.hpp"

namespace transaxis {

class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw ArgumentError("alias table needs at least one weight");
    long double sum = 0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("alias weights must be finite and non-negative");
      sum += w;
    }
    if (!(sum > 0)) throw ArgumentError("alias weights must contain a positive entry");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<long double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t k = 0; k < n; ++k) {
      scaled[k] = static_cast<long double>(weights[k]) * static_cast<long double>(n) / sum;
      (scaled[k] < 1.0L ? small : large).push_back(k);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = static_cast<double>(scaled[s]);
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0L;
      if (scaled[l] < 1.0L) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t k : large) {
      prob_[k] = 1.0;
      alias_[k] = k;
    }
    for (std::size_t k : small) {
      prob_[k] = 1.0;
      alias_[k] = k;
    }
  }

  std::size_t size() const noexcept { return prob_.size(); }

  /// Draw from two independent uniforms in [0, 1).
  std::size_t sample(double u_bucket, double u_coin) const noexcept {
    auto k = static_cast<std::size_t>(u_bucket * static_cast<double>(prob_.size()));
    if (k >= prob_.size()) k = prob_.size() - 1;
    return u_coin < prob_[k] ? k : alias_[k];
  }

  std::size_t sample(Rng& rng) const {
    const double a = uniform01(rng);
    const double b = uniform01(rng);
    return sample(a, b);
  }

  /// Probability the table assigns to item k, read back from its buckets.
  double probability(std::size_t k) const {
    const double n = static_cast<double>(prob_.size());
    double mass = prob_.at(k);
    for (std::size_t b = 0; b < prob_.size(); ++b) {
      if (alias_[b] == k && b != k) mass += 1.0 - prob_[b];
    }
    return mass / n;
  }

  const std::vector<double>& bucket_probabilities() const noexcept { return prob_; }
  const std::vector<std::size_t>& aliases() const noexcept { return alias_; }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

inline AliasTable build_alias_table(std::span<const double> weights) { return AliasTable(weights); }

}  // namespace transaxis
