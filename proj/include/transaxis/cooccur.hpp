#pragma once

// Sliding-window co-occurrence counts: m_ij = number of papers published in
// [t - window + 1, t] whose term set contains both i and j.

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"

namespace transaxis {

struct CooccurrenceEntry {
  TermId i = 0;
  TermId j = 0;  // i < j
  std::uint64_t count = 0;
  bool operator==(const CooccurrenceEntry&) const = default;
};

/// Upper-triangular sparse counts for one window, sorted by (i, j).
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;
  explicit CooccurrenceMatrix(Year window_end) : window_end_(window_end) {}

  Year window_end() const noexcept { return window_end_; }
  const std::vector<CooccurrenceEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t edge_count() const noexcept { return entries_.size(); }

  /// Papers in the window carrying each term. Not serialized in edge lists.
  const std::map<TermId, std::uint64_t>& node_paper_counts() const noexcept { return node_counts_; }
  std::uint64_t papers_in_window() const noexcept { return papers_; }

  std::uint64_t count(TermId a, TermId b) const {
    if (a == b) return 0;
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{a, b},
                               [](const CooccurrenceEntry& e, const std::pair<TermId, TermId>& k) {
                                 return std::pair{e.i, e.j} < k;
                               });
    return (it != entries_.end() && it->i == a && it->j == b) ? it->count : 0;
  }

  /// Distinct terms with at least one edge, ascending.
  std::vector<TermId> vocabulary() const {
    std::vector<TermId> v;
    for (const auto& e : entries_) {
      v.push_back(e.i);
      v.push_back(e.j);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  std::uint64_t total_weight() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.count;
    return s;
  }

  /// Entry-wise sum of two matrices for the same window.
  CooccurrenceMatrix& merge(const CooccurrenceMatrix& other) {
    std::vector<CooccurrenceEntry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.cbegin();
    auto b = other.entries_.cbegin();
    auto key = [](const CooccurrenceEntry& e) { return std::pair{e.i, e.j}; };
    while (a != entries_.cend() || b != other.entries_.cend()) {
      if (b == other.entries_.cend() || (a != entries_.cend() && key(*a) < key(*b))) {
        merged.push_back(*a++);
      } else if (a == entries_.cend() || key(*b) < key(*a)) {
        merged.push_back(*b++);
      } else {
        merged.push_back({a->i, a->j, a->count + b->count});
        ++a;
        ++b;
      }
    }
    entries_ = std::move(merged);
    for (const auto& [t, n] : other.node_counts_) node_counts_[t] += n;
    papers_ += other.papers_;
    return *this;
  }

  /// Builds from unsorted (i, j, count) triples; pairs are normalised to i < j
  /// and repeated pairs summed. Self pairs are rejected.
  static CooccurrenceMatrix from_entries(Year window_end, std::vector<CooccurrenceEntry> raw) {
    CooccurrenceMatrix m(window_end);
    for (auto& e : raw) {
      if (e.i == e.j) throw DataError("co-occurrence entry on the diagonal for term " + std::to_string(e.i));
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return std::pair{a.i, a.j} < std::pair{b.i, b.j}; });
    for (const auto& e : raw) {
      if (e.count == 0) continue;
      if (!m.entries_.empty() && m.entries_.back().i == e.i && m.entries_.back().j == e.j) {
        m.entries_.back().count += e.count;
      } else {
        m.entries_.push_back(e);
      }
    }
    return m;
  }

  /// Equality of window and pair counts.
  bool operator==(const CooccurrenceMatrix& o) const {
    return window_end_ == o.window_end_ && entries_ == o.entries_;
  }

 private:
  friend CooccurrenceMatrix count_window(std::span<const PaperRecord>, Year, Year);

  Year window_end_ = 0;
  std::vector<CooccurrenceEntry> entries_;
  std::map<TermId, std::uint64_t> node_counts_;
  std::uint64_t papers_ = 0;
};

inline std::uint64_t pair_key(TermId a, TermId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

/// Single-partition count over papers with year in [first_year, t].
inline CooccurrenceMatrix count_window(std::span<const PaperRecord> papers, Year first_year, Year t) {
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  CooccurrenceMatrix m(t);
  std::vector<TermId> terms;
  for (const auto& p : papers) {
    if (p.year < first_year || p.year > t) continue;
    terms.assign(p.terms.begin(), p.terms.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.empty()) continue;
    ++m.papers_;
    for (std::size_t a = 0; a < terms.size(); ++a) {
      ++m.node_counts_[terms[a]];
      for (std::size_t b = a + 1; b < terms.size(); ++b) ++counts[pair_key(terms[a], terms[b])];
    }
  }
  m.entries_.reserve(counts.size());
  for (const auto& [k, n] : counts) {
    m.entries_.push_back({static_cast<TermId>(k >> 32), static_cast<TermId>(k & 0xffffffffu), n});
  }
  std::sort(m.entries_.begin(), m.entries_.end(),
            [](const auto& a, const auto& b) { return std::pair{a.i, a.j} < std::pair{b.i, b.j}; });
  return m;
}

/// Co-occurrence matrix of the window ending at t. Papers are split into
/// per-thread partitions and merged by addition, so the result does not
/// depend on the thread count or paper order.
inline CooccurrenceMatrix build_window_matrix(std::span<const PaperRecord> papers, Year t, int window = 5,
                                              unsigned threads = 1) {
  if (window < 1) throw ArgumentError("window length must be at least 1");
  const Year first = t - window + 1;
  threads = std::max(1u, threads);
  std::vector<CooccurrenceMatrix> parts(threads, CooccurrenceMatrix(t));
  parallel_for(papers.size(), threads, [&](std::size_t b, std::size_t e, unsigned w) {
    parts[w] = count_window(papers.subspan(b, e - b), first, t);
  });
  CooccurrenceMatrix result(t);
  for (const auto& p : parts) result.merge(p);
  return result;
}

/// `i<TAB>j<TAB>weight`, one line per entry, sorted by (i, j).
inline void write_edge_list(const CooccurrenceMatrix& m, std::ostream& out) {
  for (const auto& e : m.entries()) out << e.i << '\t' << e.j << '\t' << e.count << '\n';
}

inline void export_edge_list(const CooccurrenceMatrix& m, const std::string& path) {
  auto out = open_output(path);
  write_edge_list(m, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline CooccurrenceMatrix read_edge_list(std::istream& in, const std::string& source, Year window_end) {
  std::vector<CooccurrenceEntry> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 3) throw ParseError(source, lineno, "expected i<TAB>j<TAB>weight");
    try {
      const auto i = parse_integer(cols[0], "i"), j = parse_integer(cols[1], "j"), w = parse_integer(cols[2], "weight");
      if (i < 0 || j < 0 || w < 0 || i > 0xffffffffLL || j > 0xffffffffLL)
        throw DataError("negative or out-of-range value");
      raw.push_back({static_cast<TermId>(i), static_cast<TermId>(j), static_cast<std::uint64_t>(w)});
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  try {
    return CooccurrenceMatrix::from_entries(window_end, std::move(raw));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

inline CooccurrenceMatrix import_edge_list(const std::string& path, Year window_end) {
  auto in = open_input(path);
  return read_edge_list(in, path, window_end);
}

inline std::string cooccur_file_name(Year t) { return "cooccur_" + std::to_string(t) + ".tsv"; }

}  // namespace transaxis
