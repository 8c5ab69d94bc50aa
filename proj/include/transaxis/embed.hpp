#pragma once

// First-order LINE embedding of a weighted co-occurrence graph: edges are
// drawn proportionally to their weight, negatives proportionally to
// degree^0.75, and both endpoints share a single vector table.

#include <atomic>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transaxis/alias.hpp"
#include "transaxis/cooccur.hpp"
#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"

namespace transaxis {

struct EmbeddingParams {
  int dim = 10;
  /// Edge samples; 0 means samples_per_edge * (number of edges).
  std::uint64_t total_samples = 0;
  std::uint64_t samples_per_edge = 100;
  int negatives = 5;
  double initial_rate = 0.025;
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const {
    if (dim < 1) throw ArgumentError("embedding dimension must be at least 1");
    if (total_samples == 0 && samples_per_edge == 0) throw ArgumentError("need at least one training sample");
    if (negatives < 1) throw ArgumentError("need at least one negative sample per edge");
    if (!(initial_rate > 0.0)) throw ArgumentError("initial learning rate must be positive");
    if (!std::isfinite(noise_exponent)) throw ArgumentError("noise exponent must be finite");
  }

  std::uint64_t resolved_samples(std::size_t edges) const {
    return total_samples > 0 ? total_samples : samples_per_edge * static_cast<std::uint64_t>(edges);
  }
};

/// Per-window term vectors, rows ordered by ascending term id.
class TermEmbedding {
 public:
  TermEmbedding() = default;
  TermEmbedding(Year window_end, int dim, std::vector<TermId> terms)
      : window_end_(window_end), dim_(dim), terms_(std::move(terms)),
        data_(terms_.size() * static_cast<std::size_t>(dim), 0.0) {
    if (!std::is_sorted(terms_.begin(), terms_.end()) ||
        std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end()) {
      throw ArgumentError("embedding terms must be strictly ascending");
    }
  }

  Year window_end() const noexcept { return window_end_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<TermId>& terms() const noexcept { return terms_; }

  std::optional<std::size_t> row_of(TermId t) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), t);
    if (it == terms_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin());
  }
  bool contains(TermId t) const { return row_of(t).has_value(); }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  /// Vector of a term, or nullopt when the term is absent from this window.
  std::optional<std::span<const double>> vector(TermId t) const {
    auto r = row_of(t);
    if (!r) return std::nullopt;
    return row(*r);
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  bool operator==(const TermEmbedding&) const = default;

 private:
  Year window_end_ = 0;
  int dim_ = 0;
  std::vector<TermId> terms_;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// u.v / (|u| |v|), clamped to [-1, 1].
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ArgumentError("cosine of vectors with different lengths");
  const double nu = norm(u), nv = norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw NumericError("cosine of a zero-norm vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

namespace detail {

/// Graph view of a matrix with local (row) indices.
struct LineGraph {
  std::vector<TermId> terms;
  std::vector<std::uint32_t> src, dst;
  std::vector<double> weight;
  std::vector<double> degree;
  AliasTable edges;
  AliasTable noise;
};

inline LineGraph make_line_graph(const CooccurrenceMatrix& m, double noise_exponent) {
  if (m.empty()) throw DataError("cannot embed an empty co-occurrence matrix (window " +
                                 std::to_string(m.window_end()) + ")");
  LineGraph g;
  g.terms = m.vocabulary();
  std::unordered_map<TermId, std::uint32_t> local;
  for (std::uint32_t r = 0; r < g.terms.size(); ++r) local.emplace(g.terms[r], r);
  g.degree.assign(g.terms.size(), 0.0);
  for (const auto& e : m.entries()) {
    const auto a = local.at(e.i), b = local.at(e.j);
    g.src.push_back(a);
    g.dst.push_back(b);
    g.weight.push_back(static_cast<double>(e.count));
    g.degree[a] += static_cast<double>(e.count);
    g.degree[b] += static_cast<double>(e.count);
  }
  std::vector<double> noise(g.degree.size());
  for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = std::pow(g.degree[k], noise_exponent);
  g.edges = AliasTable(g.weight);
  g.noise = AliasTable(noise);
  return g;
}

}  // namespace detail

/// Starting point of training: uniform in [-0.5/d, 0.5/d] per coordinate.
inline TermEmbedding initial_embedding(const CooccurrenceMatrix& m, const EmbeddingParams& p) {
  p.validate();
  if (m.empty()) throw DataError("cannot embed an empty co-occurrence matrix");
  TermEmbedding e(m.window_end(), p.dim, m.vocabulary());
  Rng rng = make_rng(p.seed, 0);
  for (double& x : e.data()) x = (uniform01(rng) - 0.5) / p.dim;
  return e;
}

/// Trains first-order LINE. With threads == 1 the result is a pure function
/// of (matrix, params). With more threads, workers update the shared table
/// without locks (relaxed atomics, last write wins) and results vary run to run.
inline TermEmbedding train_line(const CooccurrenceMatrix& m, const EmbeddingParams& p) {
  TermEmbedding emb = initial_embedding(m, p);
  const detail::LineGraph g = detail::make_line_graph(m, p.noise_exponent);
  const std::uint64_t total = p.resolved_samples(g.src.size());
  const auto dim = static_cast<std::size_t>(p.dim);
  double* table = emb.data().data();
  const unsigned workers = std::max(1u, p.threads);

  auto worker = [&](std::size_t, std::size_t, unsigned w) {
    const std::uint64_t begin = total * w / workers, end = total * (w + 1) / workers;
    const std::uint64_t mine = end - begin;
    Rng rng = make_rng(p.seed, 1 + w);
    std::vector<double> err(dim), u(dim), v(dim);
    auto load = [&](std::size_t row, std::vector<double>& into) {
      for (std::size_t k = 0; k < dim; ++k) into[k] = std::atomic_ref<double>(table[row * dim + k]).load(std::memory_order_relaxed);
    };
    for (std::uint64_t s = 0; s < mine; ++s) {
      const double rate = std::max(p.initial_rate * (1.0 - static_cast<double>(s) / static_cast<double>(mine)),
                                   p.initial_rate * 1e-4);
      const std::size_t e = g.edges.sample(rng);
      std::size_t src = g.src[e], pos = g.dst[e];
      if (uniform01(rng) < 0.5) std::swap(src, pos);
      load(src, u);
      std::fill(err.begin(), err.end(), 0.0);
      for (int d = 0; d <= p.negatives; ++d) {
        const std::size_t target = d == 0 ? pos : g.noise.sample(rng);
        const double label = d == 0 ? 1.0 : 0.0;
        load(target, v);
        const double x = dot(u, v);
        const double grad = (label - sigmoid(x)) * rate;
        for (std::size_t k = 0; k < dim; ++k) {
          err[k] += grad * v[k];
          std::atomic_ref<double>(table[target * dim + k]).store(v[k] + grad * u[k], std::memory_order_relaxed);
        }
        if (target == src) load(src, u);
      }
      for (std::size_t k = 0; k < dim; ++k) {
        std::atomic_ref<double> cell(table[src * dim + k]);
        const double next = cell.load(std::memory_order_relaxed) + err[k];
        if (!std::isfinite(next)) {
          throw NumericError("non-finite embedding value for term " + std::to_string(g.terms[src]) +
                             " in window " + std::to_string(m.window_end()) + " at sample " +
                             std::to_string(begin + s) + " (rate " + format_real(rate) + ")");
        }
        cell.store(next, std::memory_order_relaxed);
      }
    }
  };
  parallel_for(workers, workers, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t w = b; w < e; ++w) worker(0, 0, static_cast<unsigned>(w));
  });

  if (!emb.all_finite()) throw NumericError("non-finite values after training window " + std::to_string(m.window_end()));
  return emb;
}

/// Mean negative-sampling objective log s(u.v) + sum_k log s(-u.n_k).
/// When sample_size reaches the number of edges the expectation is computed
/// exactly: edges weighted by count, both orientations, negatives by the
/// noise distribution. Otherwise edges and negatives are sampled.
inline double loss_estimate(const TermEmbedding& emb, const CooccurrenceMatrix& m, std::uint64_t sample_size,
                            std::uint64_t seed, int negatives = 5, double noise_exponent = 0.75) {
  if (sample_size == 0) throw ArgumentError("loss sample size must be at least 1");
  const detail::LineGraph g = detail::make_line_graph(m, noise_exponent);
  std::vector<std::span<const double>> rows;
  rows.reserve(g.terms.size());
  for (TermId t : g.terms) {
    auto v = emb.vector(t);
    if (!v) throw LookupError("embedding lacks term " + std::to_string(t) + " of the matrix");
    rows.push_back(*v);
  }
  if (sample_size >= g.src.size()) {
    double noise_total = 0;
    for (std::size_t k = 0; k < g.degree.size(); ++k) noise_total += std::pow(g.degree[k], noise_exponent);
    std::vector<double> expected_negative(rows.size(), 0.0);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t n = 0; n < rows.size(); ++n) {
        expected_negative[a] += std::pow(g.degree[n], noise_exponent) / noise_total * log_sigmoid(-dot(rows[a], rows[n]));
      }
    }
    double total_w = 0, acc = 0;
    for (std::size_t e = 0; e < g.src.size(); ++e) {
      const double pos = log_sigmoid(dot(rows[g.src[e]], rows[g.dst[e]]));
      const double neg = 0.5 * (expected_negative[g.src[e]] + expected_negative[g.dst[e]]);
      acc += g.weight[e] * (pos + negatives * neg);
      total_w += g.weight[e];
    }
    return acc / total_w;
  }
  Rng rng = make_rng(seed, 0x1055);
  double acc = 0;
  for (std::uint64_t s = 0; s < sample_size; ++s) {
    const std::size_t e = g.edges.sample(rng);
    std::size_t src = g.src[e], pos = g.dst[e];
    if (uniform01(rng) < 0.5) std::swap(src, pos);
    double obj = log_sigmoid(dot(rows[src], rows[pos]));
    for (int k = 0; k < negatives; ++k) obj += log_sigmoid(-dot(rows[src], rows[g.noise.sample(rng)]));
    acc += obj;
  }
  return acc / static_cast<double>(sample_size);
}

// ---------------------------------------------------------------------------
// emb_<t>.tsv: "#d=<d> seed=<seed>" then term<TAB>v1<TAB>...<TAB>vd, 9 significant digits.

inline std::string embedding_file_name(Year t) { return "emb_" + std::to_string(t) + ".tsv"; }

inline void write_embedding(const TermEmbedding& e, const MeshVocabulary& vocab, std::uint64_t seed, std::ostream& out) {
  out << "#d=" << e.dim() << " seed=" << seed << '\n';
  for (std::size_t r = 0; r < e.size(); ++r) {
    out << vocab.name(e.terms()[r]);
    for (double x : e.row(r)) out << '\t' << format_real(x, 9);
    out << '\n';
  }
}

inline void write_embedding(const TermEmbedding& e, const MeshVocabulary& vocab, std::uint64_t seed,
                            const std::string& path) {
  auto out = open_output(path);
  write_embedding(e, vocab, seed, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline TermEmbedding read_embedding(std::istream& in, const std::string& source, const MeshVocabulary& vocab,
                                    Year window_end) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing embedding header");
  int dim = 0;
  {
    const auto header = chomp(line);
    if (header.rfind("#d=", 0) != 0) throw ParseError(source, 1, "expected '#d=<d> seed=<seed>' header");
    const auto fields = split(header.substr(1), ' ');
    try {
      dim = static_cast<int>(parse_integer(fields[0].substr(2), "dimension"));
    } catch (const DataError& e) {
      throw ParseError(source, 1, e.what());
    }
    if (dim < 1) throw ParseError(source, 1, "dimension must be positive");
  }
  std::map<TermId, std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != static_cast<std::size_t>(dim) + 1) {
      throw ParseError(source, lineno, "expected term and " + std::to_string(dim) + " values");
    }
    const auto id = vocab.find(std::string(cols[0]));
    if (!id) throw ParseError(source, lineno, "term not in vocabulary: '" + std::string(cols[0]) + "'");
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      try {
        v[static_cast<std::size_t>(k)] = parse_real(cols[static_cast<std::size_t>(k) + 1], "vector component");
      } catch (const DataError& e) {
        throw ParseError(source, lineno, e.what());
      }
      if (!std::isfinite(v[static_cast<std::size_t>(k)])) throw ParseError(source, lineno, "non-finite component");
    }
    if (!rows.emplace(*id, std::move(v)).second) throw ParseError(source, lineno, "duplicate term");
  }
  std::vector<TermId> terms;
  for (const auto& [t, v] : rows) terms.push_back(t);
  TermEmbedding e(window_end, dim, std::move(terms));
  std::size_t r = 0;
  for (const auto& [t, v] : rows) std::copy(v.begin(), v.end(), e.row(r++).begin());
  return e;
}

inline TermEmbedding read_embedding(const std::string& path, const MeshVocabulary& vocab, Year window_end) {
  auto in = open_input(path);
  return read_embedding(in, path, vocab, window_end);
}

}  // namespace transaxis
