#pragma once

// Vocabulary tree, paper records, citation edges and journal metadata.
//
// Every term carries one category derived from its tree numbers: a tree
// number lies in a subtree when it equals a configured root code or extends
// it with '.'. Precedence over all of a term's tree numbers is
// AppliedHuman > BasicAnimal > BasicCellMolecular > Neutral.

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "transaxis/core.hpp"

namespace transaxis {

enum class Category : std::uint8_t { BasicCellMolecular, BasicAnimal, AppliedHuman, Neutral };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::BasicCellMolecular: return "BasicCellMolecular";
    case Category::BasicAnimal: return "BasicAnimal";
    case Category::AppliedHuman: return "AppliedHuman";
    case Category::Neutral: return "Neutral";
  }
  return "Neutral";
}

inline Category category_from_string(std::string_view s) {
  if (s == "BasicCellMolecular") return Category::BasicCellMolecular;
  if (s == "BasicAnimal") return Category::BasicAnimal;
  if (s == "AppliedHuman") return Category::AppliedHuman;
  if (s == "Neutral") return Category::Neutral;
  throw DataError("unknown category '" + std::string(s) + "'");
}

inline bool is_basic(Category c) {
  return c == Category::BasicCellMolecular || c == Category::BasicAnimal;
}
inline bool is_applied(Category c) { return c == Category::AppliedHuman; }

/// Root codes of the coded subtrees. Cell/molecular roots cover cells,
/// archaea, bacteria, viruses, molecular structure and chemical processes;
/// animal roots cover Eukaryota; human roots cover Humans and Persons.
struct SubtreeRoots {
  std::vector<std::string> cell_molecular{"A11", "B02", "B03", "B04", "G02.111.570", "G02.149"};
  std::vector<std::string> animal{"B01"};
  std::vector<std::string> human{"B01.050.150.900.649.313.988.400.112.400.400", "M01"};

  void validate() const {
    if (cell_molecular.empty() || animal.empty() || human.empty()) {
      throw ArgumentError("every category needs at least one subtree root code");
    }
  }
  bool operator==(const SubtreeRoots&) const = default;
};

struct VocabularyOptions {
  SubtreeRoots roots;
  /// Top-level branch letters admitted to scoring.
  std::string branches = "ABCDEGMN";
};

inline bool in_subtree(std::string_view tree_number, std::string_view root) {
  if (tree_number.size() < root.size() || tree_number.substr(0, root.size()) != root) return false;
  return tree_number.size() == root.size() || tree_number[root.size()] == '.';
}

/// Category of a set of tree numbers under the precedence rule. Tree numbers
/// outside the admitted branches are ignored.
inline Category classify_tree_numbers(const std::vector<std::string>& tree_numbers,
                                      const VocabularyOptions& opts) {
  bool human = false, animal = false, cell = false;
  auto any_root = [](std::string_view tn, const std::vector<std::string>& roots) {
    return std::any_of(roots.begin(), roots.end(), [&](const std::string& r) { return in_subtree(tn, r); });
  };
  for (const auto& tn : tree_numbers) {
    if (tn.empty() || opts.branches.find(tn.front()) == std::string::npos) continue;
    human = human || any_root(tn, opts.roots.human);
    animal = animal || any_root(tn, opts.roots.animal);
    cell = cell || any_root(tn, opts.roots.cell_molecular);
  }
  if (human) return Category::AppliedHuman;
  if (animal) return Category::BasicAnimal;
  if (cell) return Category::BasicCellMolecular;
  return Category::Neutral;
}

struct Term {
  std::string name;
  std::vector<std::string> tree_numbers;
  Category category = Category::Neutral;
  /// Sorted distinct top-level branch letters.
  std::string branches;
  /// True when no tree number lies in an admitted branch.
  bool excluded = false;
};

/// Term <-> dense id map with resolved categories. Immutable once built.
class MeshVocabulary {
 public:
  MeshVocabulary() = default;

  /// Builds from (term, tree_number) pairs; ids follow first appearance.
  static MeshVocabulary from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                   const VocabularyOptions& opts = {}) {
    opts.roots.validate();
    MeshVocabulary v;
    std::set<std::pair<TermId, std::string>> seen;
    for (const auto& [name, tn] : pairs) {
      auto [it, inserted] = v.index_.try_emplace(name, static_cast<TermId>(v.terms_.size()));
      if (inserted) v.terms_.push_back(Term{name, {}, Category::Neutral, {}, true});
      if (!seen.emplace(it->second, tn).second) {
        ++v.duplicate_pairs_;
        continue;
      }
      v.terms_[it->second].tree_numbers.push_back(tn);
    }
    for (auto& t : v.terms_) {
      std::set<char> letters;
      for (const auto& tn : t.tree_numbers) letters.insert(tn.front());
      t.branches.assign(letters.begin(), letters.end());
      t.excluded = std::none_of(letters.begin(), letters.end(),
                                [&](char c) { return opts.branches.find(c) != std::string::npos; });
      t.category = t.excluded ? Category::Neutral : classify_tree_numbers(t.tree_numbers, opts);
    }
    v.options_ = opts;
    return v;
  }

  std::size_t size() const noexcept { return terms_.size(); }
  const Term& term(TermId id) const {
    if (id >= terms_.size()) throw LookupError("unknown term id " + std::to_string(id));
    return terms_[id];
  }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::optional<TermId> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  TermId id_of(const std::string& name) const {
    auto id = find(name);
    if (!id) throw LookupError("unknown term '" + name + "'");
    return *id;
  }
  const std::string& name(TermId id) const { return term(id).name; }
  Category category(TermId id) const { return term(id).category; }
  bool excluded(TermId id) const { return term(id).excluded; }
  std::size_t duplicate_pairs() const noexcept { return duplicate_pairs_; }
  const VocabularyOptions& options() const noexcept { return options_; }

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string, TermId> index_;
  std::size_t duplicate_pairs_ = 0;
  VocabularyOptions options_;
};

/// Category of a term, recomputed from its tree numbers.
inline Category classify_term(TermId id, const MeshVocabulary& vocab) {
  const Term& t = vocab.term(id);
  if (t.excluded) return Category::Neutral;
  return classify_tree_numbers(t.tree_numbers, vocab.options());
}

/// Parses `term<TAB>tree_number` lines. Blank lines are skipped.
inline MeshVocabulary parse_mesh_tree(std::istream& in, const std::string& source,
                                      const VocabularyOptions& opts = {}) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 2) throw ParseError(source, lineno, "expected term<TAB>tree_number");
    const auto name = trim(cols[0]);
    const auto tn = trim(cols[1]);
    if (name.empty() || tn.empty()) throw ParseError(source, lineno, "empty term or tree number");
    pairs.emplace_back(std::string(name), std::string(tn));
  }
  return MeshVocabulary::from_pairs(pairs, opts);
}

inline MeshVocabulary load_mesh_tree(const std::string& path, const VocabularyOptions& opts = {}) {
  auto in = open_input(path);
  return parse_mesh_tree(in, path, opts);
}

// ---------------------------------------------------------------------------
// Papers

struct PaperRecord {
  std::string pmid;
  Year year = 0;
  std::string journal;
  /// Distinct known terms from admitted branches, in input order.
  std::vector<TermId> terms;
  /// Size of the original (deduplicated) term list, before any filtering.
  std::uint32_t n_original = 0;
  std::optional<int> trial_phase;

  /// Strictly more than half of the original terms are known vocabulary terms.
  bool majority_known() const noexcept { return 2 * terms.size() > n_original; }
  bool operator==(const PaperRecord&) const = default;
};

struct PaperParseOptions {
  Year min_year = 1976;
  Year max_year = 2013;
  unsigned threads = 1;
};

struct PaperParseStats {
  std::size_t records = 0;
  std::size_t accepted = 0;
  std::size_t rejected_malformed = 0;
  std::size_t rejected_missing_field = 0;
  std::size_t rejected_invalid_year = 0;
  std::size_t rejected_invalid_field = 0;
  std::size_t unknown_terms = 0;
  std::size_t excluded_branch_terms = 0;
  std::size_t not_majority = 0;
};

struct PaperParseResult {
  std::vector<PaperRecord> papers;
  PaperParseStats stats;
};

namespace detail {

enum class RecordStatus { ok, malformed, missing_field, invalid_year, invalid_field };

struct ParsedLine {
  RecordStatus status = RecordStatus::ok;
  PaperRecord record;
  std::size_t unknown = 0;
  std::size_t excluded = 0;
};

inline ParsedLine parse_paper_line(std::string_view line, const MeshVocabulary& vocab,
                                   const PaperParseOptions& opts) {
  ParsedLine out;
  nlohmann::json j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    out.status = RecordStatus::malformed;
    return out;
  }
  for (const char* key : {"pmid", "year", "journal", "mesh"}) {
    if (!j.contains(key) || j[key].is_null()) {
      out.status = RecordStatus::missing_field;
      return out;
    }
  }
  if (!j["pmid"].is_string() || !j["journal"].is_string() || !j["mesh"].is_array()) {
    out.status = RecordStatus::invalid_field;
    return out;
  }
  if (!j["year"].is_number_integer()) {
    out.status = RecordStatus::invalid_year;
    return out;
  }
  const auto year = j["year"].get<long long>();
  if (year < opts.min_year || year > opts.max_year) {
    out.status = RecordStatus::invalid_year;
    return out;
  }
  PaperRecord& rec = out.record;
  rec.pmid = j["pmid"].get<std::string>();
  rec.year = static_cast<Year>(year);
  rec.journal = j["journal"].get<std::string>();
  if (rec.pmid.empty()) {
    out.status = RecordStatus::missing_field;
    return out;
  }
  if (j.contains("trial_phase") && !j["trial_phase"].is_null()) {
    const auto& tp = j["trial_phase"];
    if (!tp.is_number_integer() || tp.get<long long>() < 0 || tp.get<long long>() > 4) {
      out.status = RecordStatus::invalid_field;
      return out;
    }
    rec.trial_phase = tp.get<int>();
  }
  std::unordered_set<std::string> names;
  std::unordered_set<TermId> ids;
  for (const auto& m : j["mesh"]) {
    if (!m.is_string()) {
      out.status = RecordStatus::invalid_field;
      return out;
    }
    auto name = m.get<std::string>();
    if (!names.insert(name).second) continue;
    const auto id = vocab.find(name);
    if (!id) {
      ++out.unknown;
    } else if (vocab.excluded(*id)) {
      ++out.excluded;
    } else if (ids.insert(*id).second) {
      rec.terms.push_back(*id);
    }
  }
  rec.n_original = static_cast<std::uint32_t>(names.size());
  return out;
}

}  // namespace detail

/// Parses newline-delimited JSON paper records. Rejected records are counted,
/// never thrown; output order follows input order for any thread count.
inline PaperParseResult parse_papers(std::istream& in, const MeshVocabulary& vocab,
                                     const PaperParseOptions& opts = {}) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  std::vector<detail::ParsedLine> parsed(lines.size());
  parallel_for(lines.size(), opts.threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) parsed[i] = detail::parse_paper_line(chomp(lines[i]), vocab, opts);
  });

  PaperParseResult result;
  result.stats.records = lines.size();
  for (auto& p : parsed) {
    switch (p.status) {
      case detail::RecordStatus::malformed: ++result.stats.rejected_malformed; continue;
      case detail::RecordStatus::missing_field: ++result.stats.rejected_missing_field; continue;
      case detail::RecordStatus::invalid_year: ++result.stats.rejected_invalid_year; continue;
      case detail::RecordStatus::invalid_field: ++result.stats.rejected_invalid_field; continue;
      case detail::RecordStatus::ok: break;
    }
    result.stats.unknown_terms += p.unknown;
    result.stats.excluded_branch_terms += p.excluded;
    if (!p.record.majority_known()) ++result.stats.not_majority;
    result.papers.push_back(std::move(p.record));
  }
  result.stats.accepted = result.papers.size();
  return result;
}

inline PaperParseResult parse_papers(const std::string& path, const MeshVocabulary& vocab,
                                     const PaperParseOptions& opts = {}) {
  auto in = open_input(path);
  return parse_papers(in, vocab, opts);
}

// ---------------------------------------------------------------------------
// Weber categories: which of the three coded groups a paper's terms touch.

enum class WeberCategory : std::uint8_t { None = 0, C = 1, A = 2, CA = 3, H = 4, CH = 5, AH = 6, CAH = 7 };

inline const char* to_string(WeberCategory w) {
  static constexpr std::array<const char*, 8> names{"None", "C", "A", "CA", "H", "CH", "AH", "CAH"};
  return names[static_cast<std::size_t>(w)];
}

inline WeberCategory weber_from_string(std::string_view s) {
  for (std::uint8_t i = 0; i < 8; ++i) {
    if (s == to_string(static_cast<WeberCategory>(i))) return static_cast<WeberCategory>(i);
  }
  throw DataError("unknown Weber category '" + std::string(s) + "'");
}

/// Ordered from most basic to most applied, as in the classic comparison table.
inline constexpr std::array<WeberCategory, 7> kWeberOrder{
    WeberCategory::CA, WeberCategory::C, WeberCategory::CAH, WeberCategory::A,
    WeberCategory::CH, WeberCategory::AH, WeberCategory::H};

inline WeberCategory weber_category(const PaperRecord& paper, const MeshVocabulary& vocab) {
  unsigned mask = 0;
  for (TermId t : paper.terms) {
    switch (vocab.category(t)) {
      case Category::BasicCellMolecular: mask |= 1u; break;
      case Category::BasicAnimal: mask |= 2u; break;
      case Category::AppliedHuman: mask |= 4u; break;
      case Category::Neutral: break;
    }
  }
  return static_cast<WeberCategory>(mask);
}

// ---------------------------------------------------------------------------
// Citations

struct CitationEdges {
  /// (citing, cited), deduplicated, in first-appearance order.
  std::vector<std::pair<std::string, std::string>> edges;
  std::size_t dangling = 0;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

inline CitationEdges parse_citations(std::istream& in, const std::string& source,
                                     const std::unordered_set<std::string>& known_pmids) {
  CitationEdges out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 2 || trim(cols[0]).empty() || trim(cols[1]).empty()) {
      throw ParseError(source, lineno, "expected citing_pmid<TAB>cited_pmid");
    }
    std::string citing(trim(cols[0])), cited(trim(cols[1]));
    if (!known_pmids.contains(citing) || !known_pmids.contains(cited)) {
      ++out.dangling;
      continue;
    }
    if (citing == cited) {
      ++out.self_loops;
      continue;
    }
    if (!seen.emplace(citing, cited).second) {
      ++out.duplicates;
      continue;
    }
    out.edges.emplace_back(std::move(citing), std::move(cited));
  }
  return out;
}

inline CitationEdges load_citations(const std::string& path,
                                    const std::unordered_set<std::string>& known_pmids) {
  auto in = open_input(path);
  return parse_citations(in, path, known_pmids);
}

// ---------------------------------------------------------------------------
// Journal -> field metadata

class JournalFieldMap {
 public:
  void add(const std::string& journal, const std::string& field) {
    auto& fields = entries_[journal];
    if (std::find(fields.begin(), fields.end(), field) == fields.end()) fields.push_back(field);
  }
  /// Fields of a journal; empty for journals absent from the map.
  const std::vector<std::string>& fields(const std::string& journal) const {
    static const std::vector<std::string> none;
    auto it = entries_.find(journal);
    return it == entries_.end() ? none : it->second;
  }
  bool contains(const std::string& journal) const { return entries_.contains(journal); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

inline JournalFieldMap parse_journal_fields(std::istream& in, const std::string& source) {
  JournalFieldMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = chomp(line);
    if (row.empty()) continue;
    const auto cols = split(row, '\t');
    if (cols.size() != 2 || trim(cols[0]).empty() || trim(cols[1]).empty()) {
      throw ParseError(source, lineno, "expected journal<TAB>field");
    }
    map.add(std::string(trim(cols[0])), std::string(trim(cols[1])));
  }
  return map;
}

inline JournalFieldMap load_journal_fields(const std::string& path) {
  auto in = open_input(path);
  return parse_journal_fields(in, path);
}

// ---------------------------------------------------------------------------
// Synthetic corpora with two planted term communities.

struct SyntheticSpec {
  std::size_t basic_terms = 50;
  std::size_t applied_terms = 50;
  /// Coded seeds inside each community; the remaining terms are Neutral.
  std::size_t cell_seeds = 10;
  std::size_t animal_seeds = 10;
  std::size_t human_seeds = 20;
  /// Terms in an excluded branch, drawn occasionally as noise.
  std::size_t excluded_terms = 0;
  double excluded_rate = 0.0;
  std::size_t papers = 5000;
  std::size_t min_terms = 3;
  std::size_t max_terms = 8;
  /// Probability that a term is drawn uniformly from both communities
  /// instead of the paper's home community.
  double mixing = 0.1;
  double applied_fraction = 0.5;
  Year year_from = 2000;
  Year year_to = 2004;
  std::size_t refs_per_paper = 8;
  /// Probability that a reference is drawn from the citing paper's community.
  double citation_homophily = 0.9;
  double trial_fraction = 0.1;
  std::size_t journals_per_community = 3;
  std::uint64_t seed = 1;

  void validate() const {
    if (basic_terms == 0 || applied_terms == 0) throw ArgumentError("community sizes must be positive");
    if (!(mixing >= 0.0 && mixing <= 1.0)) throw ArgumentError("mixing rate must lie in [0,1]");
    if (!(citation_homophily >= 0.0 && citation_homophily <= 1.0))
      throw ArgumentError("citation homophily must lie in [0,1]");
    if (!(applied_fraction >= 0.0 && applied_fraction <= 1.0))
      throw ArgumentError("applied fraction must lie in [0,1]");
    if (!(excluded_rate >= 0.0 && excluded_rate <= 1.0)) throw ArgumentError("excluded rate must lie in [0,1]");
    if (cell_seeds + animal_seeds > basic_terms || cell_seeds + animal_seeds == 0)
      throw ArgumentError("basic seeds must be between 1 and the basic community size");
    if (human_seeds > applied_terms || human_seeds == 0)
      throw ArgumentError("applied seeds must be between 1 and the applied community size");
    if (min_terms == 0 || min_terms > max_terms || max_terms > basic_terms + applied_terms)
      throw ArgumentError("invalid terms-per-paper range");
    if (year_from > year_to) throw ArgumentError("empty synthetic year range");
    if (journals_per_community == 0) throw ArgumentError("need at least one journal per community");
  }
};

enum class Community : std::uint8_t { Basic, Applied };

struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> mesh_pairs;
  MeshVocabulary vocab;
  std::vector<PaperRecord> papers;
  /// Community each term/paper was generated from.
  std::vector<Community> term_community;
  std::vector<Community> paper_community;
  /// Term names per paper as written to papers.jsonl (includes excluded-branch noise).
  std::vector<std::vector<std::string>> paper_mesh;
  std::vector<std::pair<std::string, std::string>> citations;
  JournalFieldMap journal_fields;
};

namespace detail {
inline std::string code3(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i + 1);
  return buf;
}
}  // namespace detail

/// Deterministic for a fixed spec (including seed).
inline SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec, const VocabularyOptions& opts = {}) {
  spec.validate();
  SyntheticCorpus c;
  Rng rng = make_rng(spec.seed, 0x5717);

  // Tree numbers hang under the first configured root of each category;
  // neutral terms go to branches that carry no coded root.
  const std::string cell_root = opts.roots.cell_molecular.front();
  const std::string animal_root = opts.roots.animal.front();
  const std::string human_root = opts.roots.human.back();
  std::size_t basic_neutral = 0, applied_neutral = 0;
  for (std::size_t i = 0; i < spec.basic_terms; ++i) {
    const std::string name = "Basic Term " + detail::code3(i);
    if (i < spec.cell_seeds) {
      c.mesh_pairs.emplace_back(name, cell_root + "." + detail::code3(i));
    } else if (i < spec.cell_seeds + spec.animal_seeds) {
      c.mesh_pairs.emplace_back(name, animal_root + ".9" + detail::code3(i));
    } else {
      c.mesh_pairs.emplace_back(name, "G04." + detail::code3(basic_neutral++));
    }
    c.term_community.push_back(Community::Basic);
  }
  for (std::size_t i = 0; i < spec.applied_terms; ++i) {
    const std::string name = "Applied Term " + detail::code3(i);
    if (i < spec.human_seeds) {
      c.mesh_pairs.emplace_back(name, human_root + "." + detail::code3(i));
    } else {
      c.mesh_pairs.emplace_back(name, "N05." + detail::code3(applied_neutral++));
    }
    c.term_community.push_back(Community::Applied);
  }
  for (std::size_t i = 0; i < spec.excluded_terms; ++i) {
    c.mesh_pairs.emplace_back("Excluded Term " + detail::code3(i), "K01." + detail::code3(i));
  }
  c.vocab = MeshVocabulary::from_pairs(c.mesh_pairs, opts);

  const std::size_t n_terms = spec.basic_terms + spec.applied_terms;
  struct Draft {
    Year year;
    Community community;
    std::vector<TermId> terms;
    std::vector<std::string> excluded;
  };
  std::vector<Draft> drafts(spec.papers);
  const auto years = static_cast<std::uint64_t>(spec.year_to - spec.year_from + 1);
  for (auto& d : drafts) {
    d.community = uniform01(rng) < spec.applied_fraction ? Community::Applied : Community::Basic;
    d.year = spec.year_from + static_cast<Year>(uniform_index(rng, years));
    const std::size_t k = spec.min_terms + uniform_index(rng, spec.max_terms - spec.min_terms + 1);
    std::unordered_set<TermId> chosen;
    while (d.terms.size() < k) {
      TermId t = 0;
      if (uniform01(rng) < spec.mixing) {
        t = static_cast<TermId>(uniform_index(rng, n_terms));
      } else if (d.community == Community::Basic) {
        t = static_cast<TermId>(uniform_index(rng, spec.basic_terms));
      } else {
        t = static_cast<TermId>(spec.basic_terms + uniform_index(rng, spec.applied_terms));
      }
      if (chosen.insert(t).second) d.terms.push_back(t);
    }
    if (spec.excluded_terms > 0 && uniform01(rng) < spec.excluded_rate) {
      d.excluded.push_back("Excluded Term " + detail::code3(uniform_index(rng, spec.excluded_terms)));
    }
  }
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) { return a.year < b.year; });

  std::vector<std::string> journals[2];
  for (std::size_t j = 0; j < spec.journals_per_community; ++j) {
    journals[0].push_back("Journal of Basic Studies " + detail::code3(j));
    journals[1].push_back("Journal of Applied Studies " + detail::code3(j));
    c.journal_fields.add(journals[0].back(), "Basic Science");
    c.journal_fields.add(journals[1].back(), "Clinical Medicine");
  }
  c.journal_fields.add(journals[1].front(), "Public Health");

  std::vector<std::size_t> by_community[2];
  std::set<std::pair<std::size_t, std::size_t>> cited;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    Draft& d = drafts[i];
    const auto home = static_cast<std::size_t>(d.community);
    PaperRecord rec;
    rec.pmid = std::to_string(1000000 + i);
    rec.year = d.year;
    rec.journal = journals[home][uniform_index(rng, journals[home].size())];
    rec.terms = d.terms;
    rec.n_original = static_cast<std::uint32_t>(d.terms.size() + d.excluded.size());
    if (d.community == Community::Applied && uniform01(rng) < spec.trial_fraction) {
      rec.trial_phase = static_cast<int>(uniform_index(rng, 5));
    }
    std::vector<std::string> mesh;
    for (TermId t : d.terms) mesh.push_back(c.vocab.name(t));
    for (auto& e : d.excluded) mesh.push_back(e);

    for (std::size_t r = 0; r < spec.refs_per_paper; ++r) {
      const std::size_t side = uniform01(rng) < spec.citation_homophily ? home : 1 - home;
      const auto& pool = by_community[side];
      if (pool.empty()) continue;
      const std::size_t target = pool[uniform_index(rng, pool.size())];
      if (cited.emplace(i, target).second) {
        c.citations.emplace_back(rec.pmid, std::to_string(1000000 + target));
      }
    }
    by_community[home].push_back(i);
    c.papers.push_back(std::move(rec));
    c.paper_community.push_back(d.community);
    c.paper_mesh.push_back(std::move(mesh));
  }
  return c;
}

/// Writes mesh_tree.tsv, papers.jsonl, citations.tsv and journal_fields.tsv.
inline void write_synthetic_corpus(const SyntheticCorpus& c, const std::string& dir) {
  {
    auto out = open_output(dir + "/mesh_tree.tsv");
    for (const auto& [name, tn] : c.mesh_pairs) out << name << '\t' << tn << '\n';
  }
  {
    auto out = open_output(dir + "/papers.jsonl");
    for (std::size_t i = 0; i < c.papers.size(); ++i) {
      const auto& p = c.papers[i];
      nlohmann::ordered_json j;
      j["pmid"] = p.pmid;
      j["year"] = p.year;
      j["journal"] = p.journal;
      j["mesh"] = c.paper_mesh[i];
      if (p.trial_phase) j["trial_phase"] = *p.trial_phase;
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open_output(dir + "/citations.tsv");
    for (const auto& [a, b] : c.citations) out << a << '\t' << b << '\n';
  }
  {
    auto out = open_output(dir + "/journal_fields.tsv");
    for (const auto& [journal, fields] : c.journal_fields.entries()) {
      for (const auto& f : fields) out << journal << '\t' << f << '\n';
    }
  }
}

}  // namespace transaxis
