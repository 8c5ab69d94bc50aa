#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "support.hpp"
#include "transaxis/corpus.hpp"

using namespace transaxis;
using testing_support::scratch_dir;

namespace {

MeshVocabulary mesh(const std::string& text, const VocabularyOptions& opts = {}) {
  std::istringstream in(text);
  return parse_mesh_tree(in, "mesh_tree.tsv", opts);
}

const char* kTree =
    "Cells\tA11\n"
    "Neurons\tA11.671\n"
    "Eukaryota\tB01\n"
    "Mice\tB01.050.150.900.649.313.992.635.505.500\n"
    "Humans\tB01.050.150.900.649.313.988.400.112.400.400\n"
    "Persons\tM01\n"
    "Patients\tM01.643\n"
    "Primates\tB01.050.150.900.649.313.988\n"
    "Primates\tB01.050.150.900.649.313.988\n"
    "Hospitals\tN02.278.421\n"
    "Cytochalasin B\tD03.132\n"
    "Geography\tZ01.107\n"
    "Physics\tH01.671\n"
    "Physics\tN05.715\n"
    "Bacteria\tB03.440\n"
    "A11-like\tA1100\n";

}  // namespace

TEST(Subtree, PrefixMatchRespectsCodeBoundaries) {
  EXPECT_TRUE(in_subtree("A11", "A11"));
  EXPECT_TRUE(in_subtree("A11.671", "A11"));
  EXPECT_FALSE(in_subtree("A1100", "A11"));
  EXPECT_FALSE(in_subtree("A1", "A11"));
}

TEST(MeshTree, CategoriesFollowPrecedence) {
  const auto v = mesh(kTree);
  auto cat = [&](const char* name) { return v.category(v.id_of(name)); };
  EXPECT_EQ(cat("Cells"), Category::BasicCellMolecular);
  EXPECT_EQ(cat("Neurons"), Category::BasicCellMolecular);
  EXPECT_EQ(cat("Bacteria"), Category::BasicCellMolecular);
  EXPECT_EQ(cat("Eukaryota"), Category::BasicAnimal);
  EXPECT_EQ(cat("Mice"), Category::BasicAnimal);
  EXPECT_EQ(cat("Primates"), Category::BasicAnimal);
  EXPECT_EQ(cat("Humans"), Category::AppliedHuman);
  EXPECT_EQ(cat("Persons"), Category::AppliedHuman);
  EXPECT_EQ(cat("Patients"), Category::AppliedHuman);
  EXPECT_EQ(cat("Hospitals"), Category::Neutral);
  EXPECT_EQ(cat("Cytochalasin B"), Category::Neutral);
  EXPECT_EQ(cat("A11-like"), Category::Neutral);
}

TEST(MeshTree, HumanWinsOverAnimal) {
  const auto v = mesh("Model\tB01.050\nModel\tM01.100\n");
  EXPECT_EQ(v.category(v.id_of("Model")), Category::AppliedHuman);
}

TEST(MeshTree, CellAndAnimalResolvesToAnimal) {
  const auto v = mesh("Oocytes\tA11.100\nOocytes\tB01.300\n");
  EXPECT_EQ(v.category(v.id_of("Oocytes")), Category::BasicAnimal);
}

TEST(MeshTree, ExcludedBranchesLeaveScoringVocabulary) {
  const auto v = mesh(kTree);
  EXPECT_TRUE(v.excluded(v.id_of("Geography")));
  EXPECT_EQ(v.category(v.id_of("Geography")), Category::Neutral);
  // One admitted branch is enough to keep a term.
  EXPECT_FALSE(v.excluded(v.id_of("Physics")));
  EXPECT_EQ(v.term(v.id_of("Physics")).branches, "HN");
}

TEST(MeshTree, DuplicatePairsAreCountedOnce) {
  const auto v = mesh(kTree);
  EXPECT_EQ(v.duplicate_pairs(), 1u);
  EXPECT_EQ(v.term(v.id_of("Primates")).tree_numbers.size(), 1u);
  EXPECT_EQ(v.size(), 14u);
}

TEST(MeshTree, IdsFollowFirstAppearance) {
  const auto v = mesh(kTree);
  EXPECT_EQ(v.id_of("Cells"), 0u);
  EXPECT_EQ(v.id_of("Neurons"), 1u);
  EXPECT_EQ(v.name(2), "Eukaryota");
}

TEST(MeshTree, MalformedLineReportsLineNumber) {
  try {
    mesh("Cells\tA11\n\nBroken line without tab\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(mesh("Cells\t\n"), ParseError);
  EXPECT_THROW(mesh("a\tb\tc\n"), ParseError);
}

TEST(MeshTree, RootsAreConfigurable) {
  VocabularyOptions opts;
  opts.roots.human = {"N02"};
  const auto v = mesh(kTree, opts);
  EXPECT_EQ(v.category(v.id_of("Hospitals")), Category::AppliedHuman);
  EXPECT_EQ(v.category(v.id_of("Persons")), Category::Neutral);
  opts.roots.animal.clear();
  EXPECT_THROW(mesh(kTree, opts), ArgumentError);
}

TEST(ClassifyTerm, AgreesWithStoredCategoryAndIsIdempotent) {
  const auto v = mesh(kTree);
  for (TermId id = 0; id < v.size(); ++id) {
    const auto c = classify_term(id, v);
    EXPECT_EQ(c, v.category(id));
    EXPECT_EQ(classify_term(id, v), c);
  }
  EXPECT_THROW(classify_term(static_cast<TermId>(v.size()), v), LookupError);
}

// ---------------------------------------------------------------------------

namespace {

PaperParseResult parse(const std::string& text, const MeshVocabulary& v, unsigned threads = 1) {
  std::istringstream in(text);
  PaperParseOptions opts;
  opts.threads = threads;
  return parse_papers(in, v, opts);
}

}  // namespace

TEST(Papers, AllKnownTermsKept) {
  const auto v = mesh(kTree);
  const auto r = parse(
      R"({"pmid":"1","year":1990,"journal":"J","mesh":["Cells","Mice","Humans","Patients","Hospitals"]})"
      "\n",
      v);
  ASSERT_EQ(r.papers.size(), 1u);
  EXPECT_EQ(r.papers[0].terms.size(), 5u);
  EXPECT_EQ(r.papers[0].n_original, 5u);
  EXPECT_TRUE(r.papers[0].majority_known());
}

TEST(Papers, MinorityKnownIsRetainedButFlagged) {
  const auto v = mesh(kTree);
  const auto r = parse(R"({"pmid":"2","year":1990,"journal":"J","mesh":["Cells","X","Y","Z"]})"
                       "\n",
                       v);
  ASSERT_EQ(r.papers.size(), 1u);
  EXPECT_EQ(r.papers[0].terms.size(), 1u);
  EXPECT_EQ(r.papers[0].n_original, 4u);
  EXPECT_FALSE(r.papers[0].majority_known());
  EXPECT_EQ(r.stats.unknown_terms, 3u);
  EXPECT_EQ(r.stats.not_majority, 1u);
}

TEST(Papers, ExactHalfIsNotMajority) {
  const auto v = mesh(kTree);
  const auto r = parse(R"({"pmid":"3","year":1990,"journal":"J","mesh":["Cells","Mice","X","Y"]})"
                       "\n",
                       v);
  EXPECT_FALSE(r.papers.at(0).majority_known());
}

TEST(Papers, ExcludedBranchTermsCountOnlyInDenominator) {
  const auto v = mesh(kTree);
  const auto r = parse(R"({"pmid":"4","year":1990,"journal":"J","mesh":["Cells","Geography","Mice"]})"
                       "\n",
                       v);
  ASSERT_EQ(r.papers.size(), 1u);
  EXPECT_EQ(r.papers[0].terms, (std::vector<TermId>{v.id_of("Cells"), v.id_of("Mice")}));
  EXPECT_EQ(r.papers[0].n_original, 3u);
  EXPECT_EQ(r.stats.excluded_branch_terms, 1u);
}

TEST(Papers, RepeatedTermNamesCollapse) {
  const auto v = mesh(kTree);
  const auto r = parse(R"({"pmid":"5","year":1990,"journal":"J","mesh":["Cells","Cells","Mice"]})"
                       "\n",
                       v);
  EXPECT_EQ(r.papers.at(0).terms.size(), 2u);
  EXPECT_EQ(r.papers.at(0).n_original, 2u);
}

TEST(Papers, RejectedRecordsAreCountedByReason) {
  const auto v = mesh(kTree);
  const std::string text =
      R"({"pmid":"1","journal":"J","mesh":["Cells"]})"
      "\n"
      R"({"pmid":"2","year":1850,"journal":"J","mesh":["Cells"]})"
      "\n"
      R"({"pmid":"3","year":"1990","journal":"J","mesh":["Cells"]})"
      "\n"
      R"({"pmid":"4","year":1990,"journal":"J","mesh":"Cells"})"
      "\n"
      R"({"pmid":"5","year":1990,"journal":"J","mesh":["Cells"],"trial_phase":7})"
      "\n"
      "{not json\n"
      "\n"
      R"({"pmid":"6","year":1990,"journal":"J","mesh":["Cells"],"trial_phase":3})"
      "\n";
  const auto r = parse(text, v);
  EXPECT_EQ(r.stats.records, 7u);
  EXPECT_EQ(r.stats.rejected_missing_field, 1u);
  EXPECT_EQ(r.stats.rejected_invalid_year, 2u);
  EXPECT_EQ(r.stats.rejected_invalid_field, 2u);
  EXPECT_EQ(r.stats.rejected_malformed, 1u);
  ASSERT_EQ(r.papers.size(), 1u);
  EXPECT_EQ(r.papers[0].pmid, "6");
  EXPECT_EQ(r.papers[0].trial_phase, 3);
}

TEST(Papers, ParsingIsPureAndThreadIndependent) {
  SyntheticSpec spec;
  spec.papers = 400;
  spec.excluded_terms = 5;
  spec.excluded_rate = 0.3;
  const auto c = generate_synthetic_corpus(spec);
  const auto dir = scratch_dir("papers_pure");
  write_synthetic_corpus(c, dir.string());
  const auto path = (dir / "papers.jsonl").string();
  PaperParseOptions one, four;
  one.min_year = four.min_year = 1900;
  four.threads = 4;
  const auto a = parse_papers(path, c.vocab, one);
  const auto b = parse_papers(path, c.vocab, one);
  const auto d = parse_papers(path, c.vocab, four);
  EXPECT_EQ(a.papers, b.papers);
  EXPECT_EQ(a.papers, d.papers);
  EXPECT_EQ(a.papers, c.papers);
}

// ---------------------------------------------------------------------------

TEST(Weber, LetterSetsFromCategories) {
  const auto v = mesh(kTree);
  auto weber = [&](std::vector<const char*> names) {
    PaperRecord p;
    for (auto n : names) p.terms.push_back(v.id_of(n));
    return weber_category(p, v);
  };
  EXPECT_EQ(weber({"Humans", "Patients"}), WeberCategory::H);
  EXPECT_EQ(weber({"Cells", "Mice"}), WeberCategory::CA);
  EXPECT_EQ(weber({"Hospitals", "Cytochalasin B"}), WeberCategory::None);
  EXPECT_EQ(weber({"Cells", "Mice", "Humans"}), WeberCategory::CAH);
  EXPECT_EQ(weber({"Mice", "Persons"}), WeberCategory::AH);
  EXPECT_EQ(weber({"Persons", "Neurons"}), WeberCategory::CH);
  EXPECT_EQ(weber({}), WeberCategory::None);
}

TEST(Weber, DependsOnlyOnCategorySet) {
  const auto v = mesh(kTree);
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    PaperRecord p;
    const auto k = 1 + uniform_index(rng, 6);
    for (std::size_t i = 0; i < k; ++i) p.terms.push_back(static_cast<TermId>(uniform_index(rng, v.size())));
    const auto w = weber_category(p, v);
    auto q = p;
    shuffle(q.terms, rng);
    q.terms.push_back(q.terms.front());
    ASSERT_EQ(weber_category(q, v), w);
  }
}

TEST(Weber, NamesRoundTrip) {
  for (std::uint8_t i = 0; i < 8; ++i) {
    const auto w = static_cast<WeberCategory>(i);
    EXPECT_EQ(weber_from_string(to_string(w)), w);
  }
  EXPECT_THROW(weber_from_string("X"), DataError);
}

TEST(Weber, CategoryCountsPartitionPapers) {
  SyntheticSpec spec;
  spec.papers = 500;
  const auto c = generate_synthetic_corpus(spec);
  std::map<WeberCategory, std::size_t> counts;
  for (const auto& p : c.papers) ++counts[weber_category(p, c.vocab)];
  std::size_t total = 0;
  for (const auto& [w, n] : counts) total += n;
  EXPECT_EQ(total, c.papers.size());
}

// ---------------------------------------------------------------------------

TEST(Citations, DanglingSelfAndDuplicateEdges) {
  const std::unordered_set<std::string> known{"A", "B", "C"};
  std::istringstream in("A\tB\nA\tA\nA\tX\nA\tB\nC\tA\n\n");
  const auto r = parse_citations(in, "citations.tsv", known);
  EXPECT_EQ(r.edges.size(), 2u);
  EXPECT_EQ(r.edges[0], (std::pair<std::string, std::string>{"A", "B"}));
  EXPECT_EQ(r.self_loops, 1u);
  EXPECT_EQ(r.dangling, 1u);
  EXPECT_EQ(r.duplicates, 1u);
}

TEST(Citations, MalformedLineThrows) {
  std::istringstream in("A\tB\nA B\n");
  EXPECT_THROW(parse_citations(in, "c", {"A", "B"}), ParseError);
}

TEST(JournalFields, LookupSemantics) {
  std::istringstream in(
      "J Biol Chem\tBiochemistry\n"
      "JAMA\tMedicine\n"
      "JAMA\tPublic Health\n"
      "JAMA\tMedicine\n");
  const auto m = parse_journal_fields(in, "journal_fields.tsv");
  EXPECT_EQ(m.fields("J Biol Chem"), std::vector<std::string>{"Biochemistry"});
  EXPECT_EQ(m.fields("JAMA"), (std::vector<std::string>{"Medicine", "Public Health"}));
  EXPECT_TRUE(m.fields("Nature").empty());
  EXPECT_FALSE(m.contains("Nature"));
  EXPECT_TRUE(m.contains("JAMA"));
  std::istringstream bad("JAMA\n");
  EXPECT_THROW(parse_journal_fields(bad, "x"), ParseError);
}

// ---------------------------------------------------------------------------

TEST(Synthetic, ZeroCommunityIsArgumentError) {
  SyntheticSpec spec;
  spec.basic_terms = 0;
  EXPECT_THROW(generate_synthetic_corpus(spec), ArgumentError);
  spec = SyntheticSpec{};
  spec.mixing = 1.5;
  EXPECT_THROW(generate_synthetic_corpus(spec), ArgumentError);
}

TEST(Synthetic, SeedCategoriesMatchCommunities) {
  const SyntheticSpec spec;
  const auto c = generate_synthetic_corpus(spec);
  std::size_t cell = 0, animal = 0, human = 0;
  for (TermId t = 0; t < c.vocab.size(); ++t) {
    const auto cat = c.vocab.category(t);
    if (is_basic(cat)) EXPECT_EQ(c.term_community[t], Community::Basic);
    if (is_applied(cat)) EXPECT_EQ(c.term_community[t], Community::Applied);
    cell += cat == Category::BasicCellMolecular;
    animal += cat == Category::BasicAnimal;
    human += cat == Category::AppliedHuman;
  }
  EXPECT_EQ(cell, spec.cell_seeds);
  EXPECT_EQ(animal, spec.animal_seeds);
  EXPECT_EQ(human, spec.human_seeds);
}

TEST(Synthetic, NoMixingKeepsPapersInsideOneCommunity) {
  SyntheticSpec spec;
  spec.mixing = 0.0;
  spec.papers = 1000;
  const auto c = generate_synthetic_corpus(spec);
  for (std::size_t i = 0; i < c.papers.size(); ++i) {
    for (TermId t : c.papers[i].terms) ASSERT_EQ(c.term_community[t], c.paper_community[i]);
  }
}

TEST(Synthetic, FullMixingIsUniformOverTerms) {
  SyntheticSpec spec;
  spec.mixing = 1.0;
  spec.papers = 4000;
  const auto c = generate_synthetic_corpus(spec);
  std::size_t own = 0, total = 0;
  for (std::size_t i = 0; i < c.papers.size(); ++i) {
    for (TermId t : c.papers[i].terms) {
      own += c.term_community[t] == c.paper_community[i];
      ++total;
    }
  }
  // Uniform choice puts half of the terms in the home community.
  const double frac = static_cast<double>(own) / static_cast<double>(total);
  const double sigma = std::sqrt(0.25 / static_cast<double>(total));
  EXPECT_NEAR(frac, 0.5, 4 * sigma);
}

TEST(Synthetic, FixedSeedIsByteIdentical) {
  SyntheticSpec spec;
  spec.papers = 300;
  const auto a = scratch_dir("synth_a"), b = scratch_dir("synth_b");
  write_synthetic_corpus(generate_synthetic_corpus(spec), a.string());
  write_synthetic_corpus(generate_synthetic_corpus(spec), b.string());
  for (const char* f : {"mesh_tree.tsv", "papers.jsonl", "citations.tsv", "journal_fields.tsv"}) {
    std::ifstream x(a / f), y(b / f);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    EXPECT_FALSE(sx.str().empty()) << f;
    EXPECT_EQ(sx.str(), sy.str()) << f;
  }
}

TEST(Synthetic, CitationsPointBackwardWithoutDuplicates) {
  SyntheticSpec spec;
  spec.papers = 500;
  const auto c = generate_synthetic_corpus(spec);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [a, b] : c.citations) {
    EXPECT_GT(std::stoll(a), std::stoll(b));
    EXPECT_TRUE(seen.emplace(a, b).second);
  }
  for (std::size_t i = 1; i < c.papers.size(); ++i) EXPECT_LE(c.papers[i - 1].year, c.papers[i].year);
}

TEST(Synthetic, TrialPhasesOnlyOnAppliedPapers) {
  SyntheticSpec spec;
  spec.papers = 2000;
  const auto c = generate_synthetic_corpus(spec);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < c.papers.size(); ++i) {
    if (!c.papers[i].trial_phase) continue;
    ++flagged;
    EXPECT_EQ(c.paper_community[i], Community::Applied);
    EXPECT_GE(*c.papers[i].trial_phase, 0);
    EXPECT_LE(*c.papers[i].trial_phase, 4);
  }
  EXPECT_GT(flagged, 0u);
}
