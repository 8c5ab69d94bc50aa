#pragma once

// Citation-network analytics over level scores: citing/cited heat map, mean
// reference difference, score-shuffling null model, and sampled-source
// reachability (R), path length (L) and year gap (Y) matrices.

#include <deque>
#include <map>
#include <numeric>
#include <type_traits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transaxis/binning.hpp"
#include "transaxis/core.hpp"

namespace transaxis {

struct ScoredPaper {
  std::string pmid;
  Year year = 0;
  double score = 0;
};

/// Directed citing -> cited graph in CSR form. Immutable after build.
class CitationGraph {
 public:
  using Node = std::uint32_t;

  std::size_t node_count() const noexcept { return papers_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  const ScoredPaper& paper(Node n) const { return papers_.at(n); }
  const std::vector<ScoredPaper>& papers() const noexcept { return papers_; }
  std::span<const Node> references(Node n) const {
    return {targets_.data() + offsets_.at(n), offsets_.at(n + 1) - offsets_[n]};
  }
  std::optional<Node> find(const std::string& pmid) const {
    auto it = index_.find(pmid);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<Node>& targets() const noexcept { return targets_; }

  /// Same topology and years, scores replaced (in node order).
  CitationGraph with_scores(std::span<const double> scores) const {
    if (scores.size() != papers_.size()) throw ArgumentError("score vector does not match node count");
    CitationGraph g = *this;
    for (std::size_t k = 0; k < scores.size(); ++k) g.papers_[k].score = scores[k];
    return g;
  }

  friend CitationGraph build_graph(std::span<const ScoredPaper>,
                                   std::span<const std::pair<std::string, std::string>>);

 private:
  std::vector<ScoredPaper> papers_;
  std::unordered_map<std::string, Node> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Node> targets_;
};

/// Nodes are the scored papers in the given order; edges whose endpoints are
/// not both scored are dropped, as are self-loops and duplicates. Reference
/// lists are sorted by node index.
inline CitationGraph build_graph(std::span<const ScoredPaper> papers,
                                 std::span<const std::pair<std::string, std::string>> edges) {
  CitationGraph g;
  for (const auto& p : papers) {
    if (!(p.score >= -1.0 && p.score <= 1.0)) throw DataError("score of " + p.pmid + " outside [-1, 1]");
    if (!g.index_.emplace(p.pmid, static_cast<CitationGraph::Node>(g.papers_.size())).second) {
      throw DataError("duplicate paper " + p.pmid + " in citation graph");
    }
    g.papers_.push_back(p);
  }
  std::vector<std::vector<CitationGraph::Node>> adj(g.papers_.size());
  for (const auto& [citing, cited] : edges) {
    auto a = g.index_.find(citing), b = g.index_.find(cited);
    if (a == g.index_.end() || b == g.index_.end() || a->second == b->second) continue;
    adj[a->second].push_back(b->second);
  }
  g.offsets_.assign(1, 0);
  for (auto& refs : adj) {
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    g.targets_.insert(g.targets_.end(), refs.begin(), refs.end());
    g.offsets_.push_back(g.targets_.size());
  }
  return g;
}

template <typename T>
using BinMatrix = std::vector<std::vector<T>>;

/// count[I][J] = edges whose citing paper is in bin I and cited paper in bin J.
inline BinMatrix<std::uint64_t> pair_heatmap(const CitationGraph& g, const BinningSpec& bins) {
  const std::size_t n = bins.count();
  BinMatrix<std::uint64_t> m(n, std::vector<std::uint64_t>(n, 0));
  for (CitationGraph::Node a = 0; a < g.node_count(); ++a) {
    const std::size_t i = bins.bin_of(g.paper(a).score);
    for (auto b : g.references(a)) ++m[i][bins.bin_of(g.paper(b).score)];
  }
  return m;
}

/// Score of the paper minus the mean score of its references; nullopt
/// without references.
inline std::optional<double> mean_reference_diff(const CitationGraph& g, CitationGraph::Node node) {
  const auto refs = g.references(node);
  if (refs.empty()) return std::nullopt;
  double sum = 0;
  for (auto r : refs) sum += g.paper(r).score;
  return g.paper(node).score - sum / static_cast<double>(refs.size());
}

/// Mean |score(citing) - score(cited)| over all edges.
inline double homophily_gap(const CitationGraph& g) {
  if (g.edge_count() == 0) throw DataError("homophily of a graph without edges");
  double sum = 0;
  for (CitationGraph::Node a = 0; a < g.node_count(); ++a) {
    for (auto b : g.references(a)) sum += std::abs(g.paper(a).score - g.paper(b).score);
  }
  return sum / static_cast<double>(g.edge_count());
}

/// Randomly permutes scores across nodes; topology and years unchanged.
inline CitationGraph shuffled_null(const CitationGraph& g, std::uint64_t seed) {
  std::vector<double> scores;
  scores.reserve(g.node_count());
  for (const auto& p : g.papers()) scores.push_back(p.score);
  Rng rng = make_rng(seed, 0x5e11);
  shuffle(scores, rng);
  return g.with_scores(scores);
}

// ---------------------------------------------------------------------------
// Reachability

/// Per target bin J, for one source i:
///   R = |reachable j in A(t_i), bin J| / |j in A(t_i), bin J|
///   L = mean BFS distance to reachable j in bin J
///   Y = mean (t_i - t_j) over reachable j in bin J
/// A(t_i) holds graph papers with year <= t_i other than i. Undefined cells
/// (empty denominator, or nothing reached) are nullopt.
struct SourceReach {
  std::vector<std::optional<double>> R, L, Y;
};

/// Cumulative per-bin paper counts by year, for the A(t) denominators.
class ReachIndex {
 public:
  ReachIndex(const CitationGraph& g, const BinningSpec& bins) : g_(&g), bins_(bins), n_bins_(bins.count()) {
    node_bin_.reserve(g.node_count());
    std::map<Year, std::vector<std::uint64_t>> per_year;
    for (const auto& p : g.papers()) {
      node_bin_.push_back(bins.bin_of(p.score));
      auto& row = per_year[p.year];
      row.resize(n_bins_, 0);
      ++row[node_bin_.back()];
    }
    std::vector<std::uint64_t> running(n_bins_, 0);
    for (auto& [y, row] : per_year) {
      for (std::size_t k = 0; k < n_bins_; ++k) running[k] += row[k];
      years_.push_back(y);
      cumulative_.push_back(running);
    }
  }

  const CitationGraph& graph() const noexcept { return *g_; }
  const BinningSpec& bins() const noexcept { return bins_; }
  std::size_t bin_count() const noexcept { return n_bins_; }
  std::size_t node_bin(CitationGraph::Node n) const { return node_bin_[n]; }

  /// Papers per bin published in or before year t.
  const std::vector<std::uint64_t>& published_until(Year t) const {
    auto it = std::upper_bound(years_.begin(), years_.end(), t);
    if (it == years_.begin()) return zero_;
    return cumulative_[static_cast<std::size_t>(it - years_.begin()) - 1];
  }

 private:
  const CitationGraph* g_;
  BinningSpec bins_;
  std::size_t n_bins_;
  std::vector<std::size_t> node_bin_;
  std::vector<Year> years_;
  std::vector<std::vector<std::uint64_t>> cumulative_;
  std::vector<std::uint64_t> zero_ = std::vector<std::uint64_t>(n_bins_, 0);
};

/// Reusable BFS buffers; one per worker.
class ReachScratch {
 public:
  explicit ReachScratch(std::size_t nodes) : dist_(nodes, -1) {}

  SourceReach run(const ReachIndex& idx, CitationGraph::Node source) {
    const CitationGraph& g = idx.graph();
    if (source >= g.node_count()) throw LookupError("unknown source node " + std::to_string(source));
    const std::size_t nb = idx.bin_count();
    const Year ti = g.paper(source).year;
    std::vector<std::uint64_t> reached_in_a(nb, 0), reached(nb, 0);
    std::vector<double> dist_sum(nb, 0.0), year_sum(nb, 0.0);

    dist_[source] = 0;
    touched_.assign(1, source);
    queue_.assign(1, source);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const auto u = queue_[head];
      for (auto v : g.references(u)) {
        if (dist_[v] >= 0) continue;
        dist_[v] = dist_[u] + 1;
        touched_.push_back(v);
        queue_.push_back(v);
        const std::size_t j = idx.node_bin(v);
        ++reached[j];
        dist_sum[j] += dist_[v];
        year_sum[j] += static_cast<double>(ti - g.paper(v).year);
        if (g.paper(v).year <= ti) ++reached_in_a[j];
      }
    }
    for (auto n : touched_) dist_[n] = -1;

    std::vector<std::uint64_t> denom = idx.published_until(ti);
    --denom[idx.node_bin(source)];
    SourceReach out{std::vector<std::optional<double>>(nb), std::vector<std::optional<double>>(nb),
                    std::vector<std::optional<double>>(nb)};
    for (std::size_t j = 0; j < nb; ++j) {
      if (denom[j] > 0) out.R[j] = static_cast<double>(reached_in_a[j]) / static_cast<double>(denom[j]);
      if (reached[j] > 0) {
        out.L[j] = dist_sum[j] / static_cast<double>(reached[j]);
        out.Y[j] = year_sum[j] / static_cast<double>(reached[j]);
      }
    }
    return out;
  }

 private:
  std::vector<int> dist_;
  std::vector<CitationGraph::Node> touched_;
  std::vector<CitationGraph::Node> queue_;
};

inline SourceReach reach_from_source(const CitationGraph& g, CitationGraph::Node source, const BinningSpec& bins) {
  if (source >= g.node_count()) throw LookupError("unknown source node " + std::to_string(source));
  ReachIndex idx(g, bins);
  ReachScratch scratch(g.node_count());
  return scratch.run(idx, source);
}

struct ReachabilityMatrices {
  BinningSpec bins;
  BinMatrix<std::optional<double>> R, L, Y;
  /// Sampled sources per source bin I.
  std::vector<std::size_t> sources_per_bin;
  std::vector<CitationGraph::Node> sample;
};

/// Uniform sample without replacement of round(fraction * N) sources (all
/// nodes, in order, when fraction == 1). Cell (I, J) averages the defined
/// per-source values of sources in bin I.
inline ReachabilityMatrices aggregate_reach(const CitationGraph& g, double sample_fraction, const BinningSpec& bins,
                                            std::uint64_t seed, unsigned threads = 1) {
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw ArgumentError("sample fraction must lie in (0, 1]");
  std::vector<CitationGraph::Node> sample(g.node_count());
  std::iota(sample.begin(), sample.end(), CitationGraph::Node{0});
  if (sample_fraction < 1.0) {
    const auto n = static_cast<std::size_t>(std::llround(sample_fraction * static_cast<double>(g.node_count())));
    Rng rng = make_rng(seed, 0x5a3b1e);
    for (std::size_t k = 0; k < n; ++k) std::swap(sample[k], sample[k + uniform_index(rng, sample.size() - k)]);
    sample.resize(n);
    std::sort(sample.begin(), sample.end());
  }
  if (sample.empty()) throw DataError("reachability sample is empty");

  const ReachIndex idx(g, bins);
  std::vector<SourceReach> per_source(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    ReachScratch scratch(g.node_count());
    for (std::size_t k = b; k < e; ++k) per_source[k] = scratch.run(idx, sample[k]);
  });

  const std::size_t nb = idx.bin_count();
  ReachabilityMatrices out;
  out.bins = bins;
  out.sources_per_bin.assign(nb, 0);
  out.sample = sample;
  struct Acc {
    double sum = 0;
    std::size_t n = 0;
  };
  BinMatrix<Acc> r(nb, std::vector<Acc>(nb)), l = r, y = r;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const std::size_t i = idx.node_bin(sample[k]);
    ++out.sources_per_bin[i];
    const SourceReach& s = per_source[k];
    for (std::size_t j = 0; j < nb; ++j) {
      if (s.R[j]) r[i][j].sum += *s.R[j], ++r[i][j].n;
      if (s.L[j]) l[i][j].sum += *s.L[j], ++l[i][j].n;
      if (s.Y[j]) y[i][j].sum += *s.Y[j], ++y[i][j].n;
    }
  }
  auto finish = [nb](const BinMatrix<Acc>& acc) {
    BinMatrix<std::optional<double>> m(nb, std::vector<std::optional<double>>(nb));
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        if (acc[i][j].n > 0) m[i][j] = acc[i][j].sum / static_cast<double>(acc[i][j].n);
    return m;
  };
  out.R = finish(r);
  out.L = finish(l);
  out.Y = finish(y);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization: matrices with bin-midpoint headers, NA for undefined cells.

inline std::string bin_label(const BinningSpec& bins, std::size_t k) { return format_real(bins.midpoint(k), 6); }

template <typename T>
void write_bin_matrix(const BinMatrix<T>& m, const BinningSpec& bins, std::ostream& out) {
  out << "row\\col";
  for (std::size_t j = 0; j < m.size(); ++j) out << '\t' << bin_label(bins, j);
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << bin_label(bins, i);
    for (const auto& cell : m[i]) {
      if constexpr (std::is_same_v<T, std::optional<double>>) {
        out << '\t' << format_optional(cell, 9);
      } else {
        out << '\t' << cell;
      }
    }
    out << '\n';
  }
}

}  // namespace transaxis
