#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"
#include "transaxis/embed.hpp"

namespace testing_support {

using namespace transaxis;

/// Vocabulary "T0".."T{n-1}"; every term sits in branch G with no coded root.
inline MeshVocabulary plain_vocab(std::size_t n) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t k = 0; k < n; ++k) pairs.emplace_back("T" + std::to_string(k), "G09." + std::to_string(k));
  return MeshVocabulary::from_pairs(pairs);
}

inline PaperRecord paper(std::string pmid, Year year, std::vector<TermId> terms, std::uint32_t n_original = 0) {
  PaperRecord p;
  p.pmid = std::move(pmid);
  p.year = year;
  p.terms = std::move(terms);
  p.n_original = n_original ? n_original : static_cast<std::uint32_t>(p.terms.size());
  return p;
}

/// Random orthogonal matrix (row-major d x d) by Gram-Schmidt on Gaussian-ish columns.
inline std::vector<double> random_orthogonal(int d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 77);
  const auto n = static_cast<std::size_t>(d);
  std::vector<std::vector<double>> q;
  while (q.size() < n) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform01(rng) * 2 - 1;
    for (const auto& u : q) {
      double p = 0;
      for (std::size_t k = 0; k < n; ++k) p += u[k] * v[k];
      for (std::size_t k = 0; k < n; ++k) v[k] -= p * u[k];
    }
    double len = 0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    if (len < 1e-6) continue;
    for (double& x : v) x /= len;
    q.push_back(v);
  }
  std::vector<double> m(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = q[r][c];
  return m;
}

inline TermEmbedding rotate(const TermEmbedding& e, const std::vector<double>& q) {
  TermEmbedding out = e;
  const auto n = static_cast<std::size_t>(e.dim());
  for (std::size_t r = 0; r < e.size(); ++r) {
    auto src = e.row(r);
    auto dst = out.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += q[i * n + k] * src[k];
      dst[i] = s;
    }
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("transaxis_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
