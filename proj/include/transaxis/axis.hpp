#pragma once

// Translational axis and level scores.
//
// For each window the axis is centroid(applied seeds) - centroid(basic seeds),
// with cell/molecular and animal seeds pooled as basic. A term's level score
// is the cosine between its vector and the axis; a paper's score is the mean
// of its terms' scores in the window ending at its publication year.

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"
#include "transaxis/embed.hpp"

namespace transaxis {

inline std::vector<double> centroid(std::span<const std::span<const double>> vectors) {
  if (vectors.empty()) throw ArgumentError("centroid of an empty set of vectors");
  std::vector<double> c(vectors.front().size(), 0.0);
  for (const auto& v : vectors) {
    if (v.size() != c.size()) throw ArgumentError("centroid of vectors with different lengths");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += v[k];
  }
  for (double& x : c) x /= static_cast<double>(vectors.size());
  return c;
}

inline std::vector<double> centroid(const std::vector<std::vector<double>>& vectors) {
  std::vector<std::span<const double>> views(vectors.begin(), vectors.end());
  return centroid(std::span<const std::span<const double>>(views));
}

struct TranslationalAxis {
  Year window_end = 0;
  std::vector<double> vector;
  std::size_t n_basic = 0;
  std::size_t n_applied = 0;
};

/// Axis of one window. Seeds missing from the window drop out of its centroids.
inline TranslationalAxis build_axis(const TermEmbedding& e, const MeshVocabulary& vocab) {
  std::vector<std::span<const double>> basic, applied;
  for (std::size_t r = 0; r < e.size(); ++r) {
    const Category c = vocab.category(e.terms()[r]);
    if (is_basic(c)) basic.push_back(e.row(r));
    if (is_applied(c)) applied.push_back(e.row(r));
  }
  if (basic.empty()) throw DataError("no basic seed term in window " + std::to_string(e.window_end()));
  if (applied.empty()) throw DataError("no applied seed term in window " + std::to_string(e.window_end()));
  TranslationalAxis axis;
  axis.window_end = e.window_end();
  axis.n_basic = basic.size();
  axis.n_applied = applied.size();
  const auto cb = centroid(std::span<const std::span<const double>>(basic));
  const auto ca = centroid(std::span<const std::span<const double>>(applied));
  axis.vector.resize(ca.size());
  for (std::size_t k = 0; k < ca.size(); ++k) axis.vector[k] = ca[k] - cb[k];
  if (!(norm(axis.vector) > 0.0)) {
    throw NumericError("zero-norm translational axis in window " + std::to_string(e.window_end()));
  }
  return axis;
}

/// Level score of a term, or nullopt when the term is absent from the window.
inline std::optional<double> term_level_score(TermId term, const TermEmbedding& e, const TranslationalAxis& axis) {
  auto v = e.vector(term);
  if (!v) return std::nullopt;
  return cosine_similarity(*v, axis.vector);
}

/// Embedding, axis and term scores of one window.
struct WindowScores {
  TermEmbedding embedding;
  TranslationalAxis axis;
  std::unordered_map<TermId, double> term_scores;
};

inline WindowScores score_window(TermEmbedding e, const MeshVocabulary& vocab) {
  WindowScores w;
  w.axis = build_axis(e, vocab);
  for (std::size_t r = 0; r < e.size(); ++r) {
    w.term_scores.emplace(e.terms()[r], cosine_similarity(e.row(r), w.axis.vector));
  }
  w.embedding = std::move(e);
  return w;
}

/// Scored windows keyed by window end year.
class LevelTables {
 public:
  void add(WindowScores w) {
    const Year t = w.embedding.window_end();
    windows_.insert_or_assign(t, std::move(w));
  }
  bool empty() const noexcept { return windows_.empty(); }
  bool has(Year t) const { return windows_.contains(t); }
  const WindowScores& at(Year t) const {
    auto it = windows_.find(t);
    if (it == windows_.end()) throw LookupError("no scored window for year " + std::to_string(t));
    return it->second;
  }
  Year first_year() const { return windows_.begin()->first; }
  Year last_year() const { return windows_.rbegin()->first; }
  std::vector<Year> years() const {
    std::vector<Year> ys;
    for (const auto& [t, w] : windows_) ys.push_back(t);
    return ys;
  }
  std::optional<double> term_score(Year t, TermId term) const {
    auto it = windows_.find(t);
    if (it == windows_.end()) return std::nullopt;
    auto s = it->second.term_scores.find(term);
    if (s == it->second.term_scores.end()) return std::nullopt;
    return s->second;
  }
  const std::map<Year, WindowScores>& windows() const noexcept { return windows_; }

 private:
  std::map<Year, WindowScores> windows_;
};

struct PaperScore {
  double score = 0;
  Year year = 0;
  std::uint32_t n_scored = 0;
  std::uint32_t n_original = 0;
};

namespace detail {
inline const WindowScores& window_for(const PaperRecord& paper, const LevelTables& tables) {
  if (tables.empty() || paper.year < tables.first_year() || paper.year > tables.last_year()) {
    throw LookupError("paper " + paper.pmid + " published in " + std::to_string(paper.year) +
                      ", outside the embedded year range");
  }
  return tables.at(paper.year);
}
}  // namespace detail

/// Mean term score at the publication year; nullopt unless strictly more
/// than half of the original terms are scored in that window.
inline std::optional<PaperScore> score_paper(const PaperRecord& paper, const LevelTables& tables) {
  const WindowScores& w = detail::window_for(paper, tables);
  double sum = 0;
  std::uint32_t n = 0;
  for (TermId t : paper.terms) {
    auto it = w.term_scores.find(t);
    if (it == w.term_scores.end()) continue;
    sum += it->second;
    ++n;
  }
  if (n == 0 || 2 * n <= paper.n_original) return std::nullopt;
  return PaperScore{std::clamp(sum / n, -1.0, 1.0), paper.year, n, paper.n_original};
}

/// Alternative paper score: cosine between the axis and the centroid of the
/// paper's term vectors. Same majority rule as score_paper.
inline std::optional<double> score_paper_alt(const PaperRecord& paper, const TermEmbedding& e,
                                             const TranslationalAxis& axis) {
  std::vector<std::span<const double>> vs;
  for (TermId t : paper.terms) {
    if (auto v = e.vector(t)) vs.push_back(*v);
  }
  if (vs.empty() || 2 * vs.size() <= paper.n_original) return std::nullopt;
  return cosine_similarity(centroid(std::span<const std::span<const double>>(vs)), axis.vector);
}

inline std::optional<double> score_paper_alt(const PaperRecord& paper, const LevelTables& tables) {
  const WindowScores& w = detail::window_for(paper, tables);
  return score_paper_alt(paper, w.embedding, w.axis);
}

// ---------------------------------------------------------------------------
// Trajectories

struct TermTrajectory {
  /// One point per embedded year in range; empty when the term never appears.
  std::vector<std::pair<Year, std::optional<double>>> points;
  /// Mean score over all terms of each embedded year in range.
  std::vector<std::pair<Year, double>> baseline;
};

inline TermTrajectory term_trajectory(TermId term, Year from, Year to, const LevelTables& tables,
                                      const MeshVocabulary& vocab) {
  if (term >= vocab.size()) throw LookupError("unknown term id " + std::to_string(term));
  if (tables.empty() || from > to || from < tables.first_year() || to > tables.last_year()) {
    throw ArgumentError("trajectory range outside the embedded years");
  }
  TermTrajectory tr;
  bool seen = false;
  for (const auto& [t, w] : tables.windows()) {
    if (t < from || t > to) continue;
    auto s = tables.term_score(t, term);
    seen = seen || s.has_value();
    tr.points.emplace_back(t, s);
    double sum = 0;
    for (const auto& [id, score] : w.term_scores) sum += score;
    tr.baseline.emplace_back(t, w.term_scores.empty() ? 0.0 : sum / static_cast<double>(w.term_scores.size()));
  }
  if (!seen) tr.points.clear();
  return tr;
}

struct YearSummary {
  Year year = 0;
  std::optional<double> mean;
  /// Population standard deviation.
  std::optional<double> stddev;
  std::size_t n = 0;
};

/// Per publication year, score statistics of scored papers carrying the term.
inline std::vector<YearSummary> papers_with_term_trajectory(
    TermId term, std::span<const PaperRecord> papers,
    const std::unordered_map<std::string, PaperScore>& scores, Year from, Year to) {
  std::map<Year, std::vector<double>> by_year;
  for (Year t = from; t <= to; ++t) by_year[t];
  for (const auto& p : papers) {
    if (p.year < from || p.year > to) continue;
    if (std::find(p.terms.begin(), p.terms.end(), term) == p.terms.end()) continue;
    auto it = scores.find(p.pmid);
    if (it == scores.end()) continue;
    by_year[p.year].push_back(it->second.score);
  }
  std::vector<YearSummary> rows;
  for (const auto& [t, xs] : by_year) {
    YearSummary row{t, std::nullopt, std::nullopt, xs.size()};
    if (!xs.empty()) {
      double m = 0;
      for (double x : xs) m += x;
      m /= static_cast<double>(xs.size());
      double v = 0;
      for (double x : xs) v += (x - m) * (x - m);
      row.mean = m;
      row.stddev = std::sqrt(v / static_cast<double>(xs.size()));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace transaxis
