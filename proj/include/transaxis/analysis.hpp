#pragma once

// Distributional statistics over level scores.

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transaxis/axis.hpp"
#include "transaxis/binning.hpp"
#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"
#include "transaxis/embed.hpp"

namespace transaxis {

struct ScoreHistogram {
  BinningSpec bins{0.02};
  std::vector<std::uint64_t> counts;
  std::size_t n = 0;
  double median = 0;
};

inline ScoreHistogram histogram(std::span<const double> scores, double width = 0.02) {
  ScoreHistogram h;
  h.bins = BinningSpec{width};
  h.counts.assign(h.bins.count(), 0);
  if (scores.empty()) throw DataError("histogram of an empty score set");
  for (double s : scores) ++h.counts[h.bins.bin_of(s)];
  h.n = scores.size();
  h.median = median(std::vector<double>(scores.begin(), scores.end()));
  return h;
}

struct Threshold {
  double value = 0;
  std::size_t bin = 0;
  double bin_width = 0;
  /// Bins of the two modes, ascending.
  std::size_t low_mode = 0;
  std::size_t high_mode = 0;
};

namespace detail {

/// 3-bin moving average; edge bins average the neighbours they have.
inline std::vector<double> smooth3(const std::vector<std::uint64_t>& c) {
  std::vector<double> s(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    double sum = 0;
    int n = 0;
    for (std::size_t j = k == 0 ? 0 : k - 1; j <= std::min(k + 1, c.size() - 1); ++j) {
      sum += static_cast<double>(c[j]);
      ++n;
    }
    s[k] = sum / n;
  }
  return s;
}

struct Peak {
  std::size_t pos;
  double height;
  double prominence;
};

/// Local maxima (plateaus collapse to their centre) with topographic prominence.
inline std::vector<Peak> find_peaks(const std::vector<double>& s) {
  std::vector<Peak> peaks;
  const std::size_t n = s.size();
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a;
    while (b + 1 < n && s[b + 1] == s[a]) ++b;
    const bool left_lower = a == 0 || s[a - 1] < s[a];
    const bool right_lower = b + 1 == n || s[b + 1] < s[a];
    if (left_lower && right_lower && !(a == 0 && b + 1 == n)) peaks.push_back({(a + b) / 2, s[a], 0.0});
    a = b + 1;
  }
  // Rank: height desc, then position asc. A peak's reference level is the
  // higher of the lowest points separating it from a better-ranked peak on
  // each side; the best-ranked peak's prominence is its height above the floor.
  auto better = [](const Peak& x, const Peak& y) {
    return x.height > y.height || (x.height == y.height && x.pos < y.pos);
  };
  const double floor = *std::min_element(s.begin(), s.end());
  for (auto& p : peaks) {
    std::optional<double> left, right;
    for (const auto& q : peaks) {
      if (!better(q, p)) continue;
      const auto [lo, hi] = std::minmax(p.pos, q.pos);
      const double valley = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(lo),
                                              s.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
      auto& side = q.pos < p.pos ? left : right;
      // The nearest better peak on a side gives the highest separating valley.
      side = side ? std::max(*side, valley) : valley;
    }
    if (!left && !right) {
      p.prominence = p.height - floor;
    } else {
      const double ref = std::max(left.value_or(-1.0), right.value_or(-1.0));
      p.prominence = p.height - ref;
    }
  }
  return peaks;
}

}  // namespace detail

/// Threshold between the two dominant modes: the midpoint of the bin with the
/// fewest raw counts strictly between them. Modes are the highest peak and
/// the most prominent other peak, located on 3-bin smoothed counts when the
/// histogram has at least 10 bins. Returns nullopt for unimodal histograms.
inline std::optional<Threshold> detect_threshold(const ScoreHistogram& h) {
  const auto& c = h.counts;
  if (c.size() < 3) return std::nullopt;
  std::vector<double> s = c.size() >= 10 ? detail::smooth3(c) : std::vector<double>(c.begin(), c.end());
  const auto peaks = detail::find_peaks(s);
  if (peaks.size() < 2) return std::nullopt;
  const auto top = std::min_element(peaks.begin(), peaks.end(), [](const auto& x, const auto& y) {
    return x.height > y.height || (x.height == y.height && x.pos < y.pos);
  });
  const detail::Peak* second = nullptr;
  for (const auto& p : peaks) {
    if (&p == &*top) continue;
    if (!second || p.prominence > second->prominence ||
        (p.prominence == second->prominence && p.height > second->height)) {
      second = &p;
    }
  }
  if (!second || !(second->prominence > 0)) return std::nullopt;
  const auto [lo, hi] = std::minmax(top->pos, second->pos);
  if (hi - lo < 2) return std::nullopt;
  const double centre = 0.5 * static_cast<double>(lo + hi);
  std::size_t best = lo + 1;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    if (c[k] < c[best] ||
        (c[k] == c[best] && std::abs(static_cast<double>(k) - centre) < std::abs(static_cast<double>(best) - centre))) {
      best = k;
    }
  }
  return Threshold{h.bins.midpoint(best), best, h.bins.width, lo, hi};
}

inline double fraction_above(std::span<const double> scores, double threshold) {
  if (scores.empty()) return 0.0;
  const auto n = std::count_if(scores.begin(), scores.end(), [&](double s) { return s > threshold; });
  return static_cast<double>(n) / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------
// Group summaries

struct KeyedScore {
  std::optional<std::string> key;
  double score = 0;
};

struct GroupStats {
  std::string key;
  std::size_t n = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  ScoreHistogram histogram;
};

struct GroupSummary {
  /// Ascending by median, then key.
  std::vector<GroupStats> groups;
  std::size_t keyed = 0;
  std::size_t excluded = 0;

  const GroupStats* find(const std::string& key) const {
    for (const auto& g : groups)
      if (g.key == key) return &g;
    return nullptr;
  }
};

inline GroupSummary group_summary(std::span<const KeyedScore> items, double hist_width = 0.02) {
  std::map<std::string, std::vector<double>> by_key;
  GroupSummary out;
  for (const auto& it : items) {
    if (!it.key) {
      ++out.excluded;
      continue;
    }
    by_key[*it.key].push_back(it.score);
    ++out.keyed;
  }
  for (auto& [key, xs] : by_key) {
    GroupStats g;
    g.key = key;
    g.n = xs.size();
    g.histogram = histogram(xs, hist_width);
    std::sort(xs.begin(), xs.end());
    g.median = sorted_quantile(xs, 0.5);
    g.q1 = sorted_quantile(xs, 0.25);
    g.q3 = sorted_quantile(xs, 0.75);
    out.groups.push_back(std::move(g));
  }
  std::sort(out.groups.begin(), out.groups.end(), [](const GroupStats& a, const GroupStats& b) {
    return a.median < b.median || (a.median == b.median && a.key < b.key);
  });
  return out;
}

// ---------------------------------------------------------------------------
// One-sided permutation test on the difference of medians.

enum class PermutationMode { Auto, Exact, MonteCarlo };

struct PermutationResult {
  /// median(b) - median(a).
  double observed = 0;
  double p_value = 1;
  bool exact = false;
  /// Splits enumerated (exact) or random permutations drawn.
  std::uint64_t resamples = 0;
};

namespace detail {

/// C(n, k), saturating at limit + 1.
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t limit) {
  k = std::min(k, n - k);
  long double c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(limit) + 0.5L) return limit + 1;
  }
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(c)));
}

inline bool at_least(double stat, double observed) {
  return stat >= observed - 1e-12 * std::max(1.0, std::abs(observed));
}

}  // namespace detail

/// Tests H1: median(b) > median(a). Exact enumeration of all splits when
/// their number does not exceed n_perm (Auto) or when forced (Exact);
/// otherwise p = (1 + #{stat >= observed}) / (1 + n_perm). Monte Carlo
/// results depend on seed and thread count only.
inline PermutationResult permutation_test_median(std::span<const double> a, std::span<const double> b,
                                                 std::uint64_t n_perm, std::uint64_t seed,
                                                 PermutationMode mode = PermutationMode::Auto,
                                                 unsigned threads = 1) {
  if (a.empty() || b.empty()) throw DataError("permutation test needs two non-empty groups");
  if (n_perm == 0 && mode != PermutationMode::Exact) throw ArgumentError("need at least one permutation");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t na = a.size(), n = pooled.size();

  PermutationResult res;
  res.observed = median(std::vector<double>(b.begin(), b.end())) - median(std::vector<double>(a.begin(), a.end()));

  const std::uint64_t limit = mode == PermutationMode::Exact ? std::numeric_limits<std::uint32_t>::max() : n_perm;
  const std::uint64_t splits = detail::binomial_capped(n, na, limit);
  const bool exact = mode == PermutationMode::Exact || (mode == PermutationMode::Auto && splits <= n_perm);
  if (exact) {
    if (splits > limit) throw ArgumentError("too many splits for exact enumeration");
    std::vector<char> in_a(n, 0);
    std::fill(in_a.begin(), in_a.begin() + static_cast<std::ptrdiff_t>(na), 1);
    std::vector<double> ga, gb;
    std::uint64_t hits = 0, total = 0;
    // prev_permutation walks every arrangement of na ones among n slots.
    do {
      ga.clear();
      gb.clear();
      for (std::size_t k = 0; k < n; ++k) (in_a[k] ? ga : gb).push_back(pooled[k]);
      if (detail::at_least(median(gb) - median(ga), res.observed)) ++hits;
      ++total;
    } while (std::prev_permutation(in_a.begin(), in_a.end()));
    res.exact = true;
    res.resamples = total;
    res.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return res;
  }

  const unsigned workers = std::max(1u, threads);
  std::vector<std::uint64_t> hits(workers, 0);
  parallel_for(workers, workers, [&](std::size_t wb, std::size_t we, unsigned) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::uint64_t begin = n_perm * w / workers, end = n_perm * (w + 1) / workers;
      Rng rng = make_rng(seed, 0x9e77 + w);
      std::vector<double> perm = pooled, ga(na), gb(n - na);
      for (std::uint64_t r = begin; r < end; ++r) {
        shuffle(perm, rng);
        std::copy(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(na), ga.begin());
        std::copy(perm.begin() + static_cast<std::ptrdiff_t>(na), perm.end(), gb.begin());
        if (detail::at_least(median(gb) - median(ga), res.observed)) ++hits[w];
      }
    }
  });
  std::uint64_t total_hits = 0;
  for (auto h : hits) total_hits += h;
  res.resamples = n_perm;
  res.p_value = static_cast<double>(1 + total_hits) / static_cast<double>(1 + n_perm);
  return res;
}

// ---------------------------------------------------------------------------
// Embedding validation: cosine of within- vs between-category term pairs.

struct SimilarityStats {
  double mean = 0;
  double median = 0;
  std::size_t pairs = 0;
};

struct WithinBetween {
  SimilarityStats within;
  SimilarityStats between;
  bool exhaustive = false;
  PermutationResult test;
};

/// Categories are pooled basic vs applied. When sample_pairs covers a pair
/// set, all of its pairs are used; otherwise pairs are drawn uniformly with
/// replacement. The test is median(within) > median(between).
inline WithinBetween within_between_similarity(const TermEmbedding& e, const MeshVocabulary& vocab,
                                               std::uint64_t sample_pairs, std::uint64_t seed,
                                               std::uint64_t n_perm = 1000) {
  std::vector<std::size_t> basic, applied;
  for (std::size_t r = 0; r < e.size(); ++r) {
    const Category c = vocab.category(e.terms()[r]);
    if (is_basic(c)) basic.push_back(r);
    if (is_applied(c)) applied.push_back(r);
  }
  if (basic.size() < 2 || applied.size() < 2) {
    throw DataError("need at least two basic and two applied terms in window " + std::to_string(e.window_end()));
  }
  auto cos = [&](std::size_t x, std::size_t y) { return cosine_similarity(e.row(x), e.row(y)); };
  const std::uint64_t nb = basic.size(), na = applied.size();
  const std::uint64_t within_total = nb * (nb - 1) / 2 + na * (na - 1) / 2;
  const std::uint64_t between_total = nb * na;
  Rng rng = make_rng(seed, 0xc0517e);

  std::vector<double> within, between;
  WithinBetween out;
  out.exhaustive = sample_pairs >= within_total && sample_pairs >= between_total;
  if (sample_pairs >= within_total) {
    for (const auto* g : {&basic, &applied})
      for (std::size_t x = 0; x < g->size(); ++x)
        for (std::size_t y = x + 1; y < g->size(); ++y) within.push_back(cos((*g)[x], (*g)[y]));
  } else {
    const double basic_share = static_cast<double>(nb * (nb - 1) / 2) / static_cast<double>(within_total);
    for (std::uint64_t k = 0; k < sample_pairs; ++k) {
      const auto& g = uniform01(rng) < basic_share ? basic : applied;
      const std::size_t x = uniform_index(rng, g.size());
      std::size_t y = uniform_index(rng, g.size() - 1);
      if (y >= x) ++y;
      within.push_back(cos(g[x], g[y]));
    }
  }
  if (sample_pairs >= between_total) {
    for (auto x : basic)
      for (auto y : applied) between.push_back(cos(x, y));
  } else {
    for (std::uint64_t k = 0; k < sample_pairs; ++k) {
      between.push_back(cos(basic[uniform_index(rng, nb)], applied[uniform_index(rng, na)]));
    }
  }
  auto stats = [](const std::vector<double>& xs) {
    SimilarityStats s;
    s.pairs = xs.size();
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    s.median = median(xs);
    return s;
  };
  out.within = stats(within);
  out.between = stats(between);
  out.test = permutation_test_median(between, within, n_perm, seed);
  return out;
}

// ---------------------------------------------------------------------------
// Clinical-trial phases

struct PhaseTest {
  std::string group_a;
  std::string group_b;
  PermutationResult result;
};

struct TrialSummary {
  /// Keys "phase1".."phase4" for present phases plus "all" (every flagged paper).
  GroupSummary groups;
  /// Consecutive present phases, one-sided: later phase has the larger median.
  std::vector<PhaseTest> tests;
};

inline TrialSummary trial_phase_summary(std::span<const PaperRecord> papers,
                                        const std::unordered_map<std::string, PaperScore>& scores,
                                        std::uint64_t n_perm, std::uint64_t seed, double hist_width = 0.02,
                                        unsigned threads = 1) {
  std::vector<KeyedScore> items;
  std::map<int, std::vector<double>> by_phase;
  for (const auto& p : papers) {
    if (!p.trial_phase) continue;
    auto it = scores.find(p.pmid);
    if (it == scores.end()) continue;
    items.push_back({std::string("all"), it->second.score});
    if (*p.trial_phase >= 1) {
      items.push_back({"phase" + std::to_string(*p.trial_phase), it->second.score});
      by_phase[*p.trial_phase].push_back(it->second.score);
    }
  }
  if (items.empty()) throw DataError("no scored clinical-trial papers");
  TrialSummary out;
  out.groups = group_summary(items, hist_width);
  std::optional<int> prev;
  for (const auto& [phase, xs] : by_phase) {
    if (prev) {
      out.tests.push_back({"phase" + std::to_string(*prev), "phase" + std::to_string(phase),
                           permutation_test_median(by_phase[*prev], xs, n_perm,
                                                   seed + static_cast<std::uint64_t>(phase), PermutationMode::Auto,
                                                   threads)});
    }
    prev = phase;
  }
  return out;
}

}  // namespace transaxis
