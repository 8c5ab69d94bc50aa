#pragma once

// File-based pipeline stages. Each stage reads the outputs of earlier stages
// from <out>/<stage>/, writes into a scratch directory, and publishes it
// atomically with a manifest.json describing configuration, seed, inputs and
// outputs. Requires OpenSSL (libcrypto) for SHA-256 digests.

#include <openssl/evp.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "transaxis/analysis.hpp"
#include "transaxis/axis.hpp"
#include "transaxis/citegraph.hpp"
#include "transaxis/config.hpp"
#include "transaxis/cooccur.hpp"
#include "transaxis/corpus.hpp"
#include "transaxis/embed.hpp"

namespace transaxis {

inline constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const fs::path& p) {
  auto in = open_input(p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string file_sha256(const fs::path& p) { return sha256_hex(read_file(p)); }

/// Stage directory names under the output root.
namespace stage {
inline constexpr const char* synth = "synth";
inline constexpr const char* ingest = "ingest";
inline constexpr const char* cooccur = "cooccur";
inline constexpr const char* embed = "embed";
inline constexpr const char* score = "score";
}  // namespace stage

inline const std::vector<std::string>& analyze_targets() {
  static const std::vector<std::string> t{"heatmap", "reach", "groups", "trials", "trajectory", "threshold", "similarity"};
  return t;
}

struct StageReport {
  std::string stage;
  fs::path directory;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> stats;
};

/// Scratch directory for one stage, published by commit(); removed if the
/// stage fails before that.
class StageWriter {
 public:
  StageWriter(const PipelineConfig& cfg, std::string name)
      : cfg_(cfg), name_(std::move(name)), root_(cfg.out), final_(root_ / name_),
        scratch_(root_ / ("." + name_ + ".partial")) {
    fs::create_directories(final_.parent_path());
    fs::remove_all(scratch_);
    fs::create_directories(scratch_);
  }
  StageWriter(const StageWriter&) = delete;
  StageWriter& operator=(const StageWriter&) = delete;
  ~StageWriter() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(scratch_, ec);
    }
  }

  fs::path path(const std::string& file) const { return scratch_ / file; }

  std::ofstream open(const std::string& file) {
    files_.insert(file);
    return open_output(path(file).string());
  }

  /// Registers a file already written into the scratch directory.
  void adopt(const std::string& file) { files_.insert(file); }

  /// Records an input by content digest under a stable name.
  void input(const std::string& name, const fs::path& p) { inputs_[name] = file_sha256(p); }
  void stat(const std::string& key, const std::string& value) { stats_.emplace_back(key, value); }
  void stat(const std::string& key, std::uint64_t value) { stat(key, std::to_string(value)); }

  StageReport commit() {
    nlohmann::ordered_json m;
    m["tool"] = "transaxis";
    m["version"] = kVersion;
    m["json_library"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    m["stage"] = name_;
    m["config_sha256"] = sha256_hex(cfg_.digest_text());
    m["seed"] = cfg_.seed;
    m["threads"] = cfg_.threads;
    m["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg_.entries())
      if (!PipelineConfig::is_path_key(k)) m["config"][k] = v;
    m["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : inputs_) m["inputs"][k] = v;
    m["outputs"] = nlohmann::ordered_json::object();
    for (const auto& f : files_) m["outputs"][f] = file_sha256(path(f));
    m["stats"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : stats_) m["stats"][k] = v;
    {
      auto out = open_output(path("manifest.json").string());
      out << m.dump(2) << '\n';
    }
    fs::remove_all(final_);
    fs::rename(scratch_, final_);
    committed_ = true;
    StageReport r{name_, final_, {files_.begin(), files_.end()}, stats_};
    return r;
  }

 private:
  const PipelineConfig& cfg_;
  std::string name_;
  fs::path root_, final_, scratch_;
  std::set<std::string> files_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::pair<std::string, std::string>> stats_;
  bool committed_ = false;
};

namespace detail {

inline fs::path input_path(const PipelineConfig& cfg, const std::string& configured, const char* file) {
  return configured.empty() ? fs::path(cfg.out) / stage::synth / file : fs::path(configured);
}

inline void require_stage(const PipelineConfig& cfg, const std::string& name, const std::string& needed_by) {
  const fs::path m = fs::path(cfg.out) / name / "manifest.json";
  if (!fs::exists(m)) {
    throw DataError("`" + needed_by + "` needs the outputs of `" + name + "` (missing " + m.string() +
                    "); run `transaxis " + name + "` first");
  }
}

inline fs::path stage_file(const PipelineConfig& cfg, const std::string& name, const std::string& file) {
  return fs::path(cfg.out) / name / file;
}

inline void require_input(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) {
    throw DataError("missing " + what + " input '" + p.string() + "' (set it in the config or run `transaxis synth`)");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stage file formats

/// ingest/vocab.tsv: term_id, term, category, excluded, tree numbers (';').
inline void write_vocab_tsv(const MeshVocabulary& v, std::ostream& out) {
  out << "term_id\tterm\tcategory\texcluded\ttree_numbers\n";
  for (TermId id = 0; id < v.size(); ++id) {
    const Term& t = v.term(id);
    out << id << '\t' << t.name << '\t' << to_string(t.category) << '\t' << (t.excluded ? 1 : 0) << '\t';
    for (std::size_t k = 0; k < t.tree_numbers.size(); ++k) out << (k ? ";" : "") << t.tree_numbers[k];
    out << '\n';
  }
}

inline MeshVocabulary read_vocab_tsv(const fs::path& p, const VocabularyOptions& opts) {
  auto in = open_input(p.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t lineno = 1;
  TermId expected = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cols = split(chomp(line), '\t');
    if (cols.size() != 5) throw ParseError(p.string(), lineno, "expected 5 columns");
    if (parse_integer(cols[0], "term_id") != expected++) throw ParseError(p.string(), lineno, "term ids not dense");
    for (auto tn : split(cols[4], ';')) pairs.emplace_back(std::string(cols[1]), std::string(tn));
  }
  return MeshVocabulary::from_pairs(pairs, opts);
}

/// ingest/papers.tsv: pmid, year, journal, trial_phase|NA, n_original, term ids (',').
inline void write_papers_tsv(std::span<const PaperRecord> papers, std::ostream& out) {
  out << "pmid\tyear\tjournal\ttrial_phase\tn_original\tterm_ids\n";
  for (const auto& p : papers) {
    out << p.pmid << '\t' << p.year << '\t' << p.journal << '\t'
        << (p.trial_phase ? std::to_string(*p.trial_phase) : "NA") << '\t' << p.n_original << '\t';
    for (std::size_t k = 0; k < p.terms.size(); ++k) out << (k ? "," : "") << p.terms[k];
    out << '\n';
  }
}

inline std::vector<PaperRecord> read_papers_tsv(const fs::path& p) {
  auto in = open_input(p.string());
  std::string line;
  std::getline(in, line);
  std::vector<PaperRecord> papers;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cols = split(chomp(line), '\t');
    if (cols.size() != 6) throw ParseError(p.string(), lineno, "expected 6 columns");
    PaperRecord r;
    r.pmid = std::string(cols[0]);
    r.year = static_cast<Year>(parse_integer(cols[1], "year"));
    r.journal = std::string(cols[2]);
    if (cols[3] != "NA") r.trial_phase = static_cast<int>(parse_integer(cols[3], "trial_phase"));
    r.n_original = static_cast<std::uint32_t>(parse_integer(cols[4], "n_original"));
    if (!cols[5].empty()) {
      for (auto t : split(cols[5], ',')) r.terms.push_back(static_cast<TermId>(parse_integer(t, "term id")));
    }
    papers.push_back(std::move(r));
  }
  return papers;
}

struct PaperScoreRow {
  std::string pmid;
  PaperScore score;
  WeberCategory weber = WeberCategory::None;
};

inline std::vector<PaperScoreRow> read_paper_scores(const fs::path& p) {
  auto in = open_input(p.string());
  std::string line;
  std::getline(in, line);
  std::vector<PaperScoreRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cols = split(chomp(line), '\t');
    if (cols.size() != 6) throw ParseError(p.string(), lineno, "expected 6 columns");
    PaperScoreRow r;
    r.pmid = std::string(cols[0]);
    r.score.year = static_cast<Year>(parse_integer(cols[1], "year"));
    r.score.score = parse_real(cols[2], "score");
    r.weber = weber_from_string(cols[3]);
    r.score.n_scored = static_cast<std::uint32_t>(parse_integer(cols[4], "n_scored"));
    r.score.n_original = static_cast<std::uint32_t>(parse_integer(cols[5], "n_original"));
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Stages

inline StageReport run_synth(const PipelineConfig& cfg) {
  cfg.validate();
  SyntheticSpec spec = cfg.synth;
  spec.seed = cfg.seed;
  const SyntheticCorpus corpus = generate_synthetic_corpus(spec, cfg.vocabulary);
  StageWriter w(cfg, stage::synth);
  write_synthetic_corpus(corpus, w.path("").string());
  for (const char* f : {"mesh_tree.tsv", "papers.jsonl", "citations.tsv", "journal_fields.tsv"}) w.adopt(f);
  w.stat("terms", corpus.vocab.size());
  w.stat("papers", corpus.papers.size());
  w.stat("citations", corpus.citations.size());
  return w.commit();
}

inline StageReport run_ingest(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path mesh = detail::input_path(cfg, cfg.mesh_tree, "mesh_tree.tsv");
  const fs::path papers_path = detail::input_path(cfg, cfg.papers, "papers.jsonl");
  const fs::path cites = detail::input_path(cfg, cfg.citations, "citations.tsv");
  const fs::path fields = detail::input_path(cfg, cfg.journal_fields, "journal_fields.tsv");
  detail::require_input(mesh, "mesh_tree");
  detail::require_input(papers_path, "papers");
  detail::require_input(cites, "citations");
  detail::require_input(fields, "journal_fields");

  const MeshVocabulary vocab = load_mesh_tree(mesh.string(), cfg.vocabulary);
  PaperParseOptions popts{cfg.first_paper_year(), cfg.year_to, cfg.threads};
  const PaperParseResult parsed = parse_papers(papers_path.string(), vocab, popts);
  std::unordered_set<std::string> pmids;
  for (const auto& p : parsed.papers) {
    if (!pmids.insert(p.pmid).second) throw DataError("duplicate pmid " + p.pmid + " in " + papers_path.string());
  }
  const CitationEdges edges = load_citations(cites.string(), pmids);
  const JournalFieldMap jf = load_journal_fields(fields.string());

  StageWriter w(cfg, stage::ingest);
  w.input("mesh_tree", mesh);
  w.input("papers", papers_path);
  w.input("citations", cites);
  w.input("journal_fields", fields);
  {
    auto out = w.open("vocab.tsv");
    write_vocab_tsv(vocab, out);
  }
  {
    auto out = w.open("papers.tsv");
    write_papers_tsv(parsed.papers, out);
  }
  {
    auto out = w.open("citations.tsv");
    for (const auto& [a, b] : edges.edges) out << a << '\t' << b << '\n';
  }
  {
    auto out = w.open("journal_fields.tsv");
    for (const auto& [j, fs_] : jf.entries())
      for (const auto& f : fs_) out << j << '\t' << f << '\n';
  }
  std::size_t excluded_terms = 0;
  for (const auto& t : vocab.terms()) excluded_terms += t.excluded ? 1 : 0;
  const auto& s = parsed.stats;
  w.stat("terms", vocab.size());
  w.stat("terms_excluded_branch", excluded_terms);
  w.stat("duplicate_tree_pairs", vocab.duplicate_pairs());
  w.stat("records", s.records);
  w.stat("papers_accepted", s.accepted);
  w.stat("rejected_malformed", s.rejected_malformed);
  w.stat("rejected_missing_field", s.rejected_missing_field);
  w.stat("rejected_invalid_year", s.rejected_invalid_year);
  w.stat("rejected_invalid_field", s.rejected_invalid_field);
  w.stat("unknown_terms_dropped", s.unknown_terms);
  w.stat("excluded_branch_terms_dropped", s.excluded_branch_terms);
  w.stat("papers_without_majority", s.not_majority);
  w.stat("citations_kept", edges.edges.size());
  w.stat("citations_dangling", edges.dangling);
  w.stat("citations_self", edges.self_loops);
  w.stat("citations_duplicate", edges.duplicates);
  w.stat("journals", jf.size());
  return w.commit();
}

inline StageReport run_cooccur(const PipelineConfig& cfg) {
  cfg.validate();
  detail::require_stage(cfg, stage::ingest, "cooccur");
  const fs::path papers_path = detail::stage_file(cfg, stage::ingest, "papers.tsv");
  const auto papers = read_papers_tsv(papers_path);
  StageWriter w(cfg, stage::cooccur);
  w.input("ingest/papers.tsv", papers_path);
  for (Year t = cfg.year_from; t <= cfg.year_to; ++t) {
    const auto m = build_window_matrix(papers, t, cfg.window, cfg.threads);
    auto out = w.open(cooccur_file_name(t));
    write_edge_list(m, out);
    w.stat("edges_" + std::to_string(t), m.edge_count());
    w.stat("papers_" + std::to_string(t), m.papers_in_window());
  }
  return w.commit();
}

inline std::uint64_t window_seed(std::uint64_t seed, Year t) {
  return splitmix64(seed ^ static_cast<std::uint64_t>(t)) >> 1;
}

inline StageReport run_embed(const PipelineConfig& cfg) {
  cfg.validate();
  detail::require_stage(cfg, stage::cooccur, "embed");
  detail::require_stage(cfg, stage::ingest, "embed");
  const fs::path vocab_path = detail::stage_file(cfg, stage::ingest, "vocab.tsv");
  const MeshVocabulary vocab = read_vocab_tsv(vocab_path, cfg.vocabulary);
  StageWriter w(cfg, stage::embed);
  w.input("ingest/vocab.tsv", vocab_path);
  for (Year t = cfg.year_from; t <= cfg.year_to; ++t) {
    const fs::path mp = detail::stage_file(cfg, stage::cooccur, cooccur_file_name(t));
    if (!fs::exists(mp)) {
      throw DataError("missing " + mp.string() + "; rerun `transaxis cooccur` for the configured years");
    }
    w.input("cooccur/" + cooccur_file_name(t), mp);
    const auto m = import_edge_list(mp.string(), t);
    if (m.empty()) throw DataError("co-occurrence matrix for window " + std::to_string(t) + " is empty");
    EmbeddingParams p = cfg.embedding;
    p.seed = window_seed(cfg.seed, t);
    p.threads = cfg.threads;
    const auto e = train_line(m, p);
    auto out = w.open(embedding_file_name(t));
    write_embedding(e, vocab, p.seed, out);
    w.stat("terms_" + std::to_string(t), e.size());
    w.stat("samples_" + std::to_string(t), p.resolved_samples(m.edge_count()));
  }
  return w.commit();
}

/// Loads every configured window from the embed stage and builds its axis.
inline LevelTables load_level_tables(const PipelineConfig& cfg, const MeshVocabulary& vocab, StageWriter* w) {
  LevelTables tables;
  for (Year t = cfg.year_from; t <= cfg.year_to; ++t) {
    const fs::path ep = detail::stage_file(cfg, stage::embed, embedding_file_name(t));
    if (!fs::exists(ep)) throw DataError("missing " + ep.string() + "; rerun `transaxis embed`");
    if (w) w->input("embed/" + embedding_file_name(t), ep);
    tables.add(score_window(read_embedding(ep.string(), vocab, t), vocab));
  }
  return tables;
}

inline StageReport run_score(const PipelineConfig& cfg) {
  cfg.validate();
  detail::require_stage(cfg, stage::ingest, "score");
  detail::require_stage(cfg, stage::embed, "score");
  const fs::path vocab_path = detail::stage_file(cfg, stage::ingest, "vocab.tsv");
  const fs::path papers_path = detail::stage_file(cfg, stage::ingest, "papers.tsv");
  const MeshVocabulary vocab = read_vocab_tsv(vocab_path, cfg.vocabulary);
  const auto papers = read_papers_tsv(papers_path);
  StageWriter w(cfg, stage::score);
  w.input("ingest/vocab.tsv", vocab_path);
  w.input("ingest/papers.tsv", papers_path);
  const LevelTables tables = load_level_tables(cfg, vocab, &w);

  {
    auto out = w.open("term_scores.tsv");
    out << "year\tterm\tscore\n";
    for (const auto& [t, win] : tables.windows()) {
      std::vector<std::pair<TermId, double>> rows(win.term_scores.begin(), win.term_scores.end());
      std::sort(rows.begin(), rows.end());
      for (const auto& [id, s] : rows) out << t << '\t' << vocab.name(id) << '\t' << format_real(s) << '\n';
    }
  }
  {
    auto out = w.open("axis.tsv");
    out << "year\tn_basic\tn_applied\tvector\n";
    for (const auto& [t, win] : tables.windows()) {
      out << t << '\t' << win.axis.n_basic << '\t' << win.axis.n_applied << '\t';
      for (std::size_t k = 0; k < win.axis.vector.size(); ++k) out << (k ? "," : "") << format_real(win.axis.vector[k]);
      out << '\n';
    }
  }
  std::size_t scored = 0, not_scoreable = 0, outside = 0;
  {
    auto out = w.open("paper_scores.tsv");
    out << "pmid\tyear\tscore\tweber_category\tn_scored\tn_original\n";
    for (const auto& p : papers) {
      if (p.year < cfg.year_from || p.year > cfg.year_to) {
        ++outside;
        continue;
      }
      const auto s = score_paper(p, tables);
      if (!s) {
        ++not_scoreable;
        continue;
      }
      ++scored;
      out << p.pmid << '\t' << p.year << '\t' << format_real(s->score) << '\t' << to_string(weber_category(p, vocab))
          << '\t' << s->n_scored << '\t' << s->n_original << '\n';
    }
  }
  w.stat("papers_scored", scored);
  w.stat("papers_not_scoreable", not_scoreable);
  w.stat("papers_outside_scored_years", outside);
  return w.commit();
}

// ---------------------------------------------------------------------------
// Analyses

namespace detail {

struct ScoredCorpus {
  MeshVocabulary vocab;
  std::vector<PaperRecord> papers;
  std::vector<PaperScoreRow> rows;
  std::unordered_map<std::string, PaperScore> by_pmid;
};

inline ScoredCorpus load_scored(const PipelineConfig& cfg, StageWriter& w, const std::string& target) {
  require_stage(cfg, stage::ingest, "analyze " + target);
  require_stage(cfg, stage::score, "analyze " + target);
  ScoredCorpus c;
  const fs::path vocab_path = stage_file(cfg, stage::ingest, "vocab.tsv");
  const fs::path papers_path = stage_file(cfg, stage::ingest, "papers.tsv");
  const fs::path scores_path = stage_file(cfg, stage::score, "paper_scores.tsv");
  w.input("ingest/vocab.tsv", vocab_path);
  w.input("ingest/papers.tsv", papers_path);
  w.input("score/paper_scores.tsv", scores_path);
  c.vocab = read_vocab_tsv(vocab_path, cfg.vocabulary);
  c.papers = read_papers_tsv(papers_path);
  c.rows = read_paper_scores(scores_path);
  for (const auto& r : c.rows) c.by_pmid.emplace(r.pmid, r.score);
  return c;
}

inline CitationGraph load_graph(const PipelineConfig& cfg, const ScoredCorpus& c, StageWriter& w) {
  const fs::path cites = stage_file(cfg, stage::ingest, "citations.tsv");
  w.input("ingest/citations.tsv", cites);
  std::unordered_set<std::string> known;
  for (const auto& r : c.rows) known.insert(r.pmid);
  auto in = open_input(cites.string());
  const CitationEdges edges = parse_citations(in, cites.string(), known);
  std::vector<ScoredPaper> nodes;
  for (const auto& r : c.rows) nodes.push_back({r.pmid, r.score.year, r.score.score});
  return build_graph(nodes, edges.edges);
}

inline void write_group_summary(const GroupSummary& g, std::ostream& out, std::ostream& hist) {
  out << "key\tn\tmedian\tq1\tq3\n";
  hist << "key\tbin\tcount\n";
  for (const auto& s : g.groups) {
    out << s.key << '\t' << s.n << '\t' << format_real(s.median) << '\t' << format_real(s.q1) << '\t'
        << format_real(s.q3) << '\n';
    for (std::size_t k = 0; k < s.histogram.counts.size(); ++k) {
      hist << s.key << '\t' << bin_label(s.histogram.bins, k) << '\t' << s.histogram.counts[k] << '\n';
    }
  }
}

inline void write_histogram(const ScoreHistogram& h, std::ostream& out) {
  out << "bin\tcount\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) out << bin_label(h.bins, k) << '\t' << h.counts[k] << '\n';
}

inline void write_perm_row(std::ostream& out, const std::string& a, const std::string& b, const PermutationResult& r) {
  out << a << '\t' << b << '\t' << format_real(r.observed) << '\t' << format_real(r.p_value) << '\t'
      << (r.exact ? std::string("exact") : std::to_string(r.resamples)) << '\n';
}

}  // namespace detail

inline StageReport run_analyze(const PipelineConfig& cfg, const std::string& target) {
  cfg.validate();
  const auto& targets = analyze_targets();
  if (std::find(targets.begin(), targets.end(), target) == targets.end()) {
    throw ArgumentError("unknown analysis '" + target + "'");
  }
  StageWriter w(cfg, "analyze_" + target);
  const detail::ScoredCorpus c = detail::load_scored(cfg, w, target);
  const BinningSpec bins{cfg.bin_width};

  if (target == "heatmap") {
    const CitationGraph g = detail::load_graph(cfg, c, w);
    {
      auto out = w.open("heatmap.tsv");
      write_bin_matrix(pair_heatmap(g, bins), bins, out);
    }
    {
      auto out = w.open("mu.tsv");
      out << "pmid\tscore\tmu\n";
      for (CitationGraph::Node n = 0; n < g.node_count(); ++n) {
        if (auto mu = mean_reference_diff(g, n)) {
          out << g.paper(n).pmid << '\t' << format_real(g.paper(n).score) << '\t' << format_real(*mu) << '\n';
        }
      }
    }
    if (g.edge_count() > 0) {
      const double observed = homophily_gap(g);
      auto out = w.open("null.tsv");
      out << "replicate\thomophily_gap\n";
      out << "observed\t" << format_real(observed) << '\n';
      std::size_t below = 0;
      for (std::uint64_t r = 0; r < cfg.null_replicates; ++r) {
        const double v = homophily_gap(shuffled_null(g, cfg.seed + r));
        below += v <= observed ? 1 : 0;
        out << r << '\t' << format_real(v) << '\n';
      }
      w.stat("homophily_gap", format_real(observed));
      w.stat("null_replicates_at_or_below_observed", below);
    }
    w.stat("nodes", g.node_count());
    w.stat("edges", g.edge_count());
  } else if (target == "reach") {
    const CitationGraph g = detail::load_graph(cfg, c, w);
    if (g.node_count() == 0) throw DataError("citation graph has no scored papers");
    const auto m = aggregate_reach(g, cfg.sample_fraction, bins, cfg.seed, cfg.threads);
    for (const auto& [name, mat] : {std::pair{"reach_R.tsv", &m.R}, {"reach_L.tsv", &m.L}, {"reach_Y.tsv", &m.Y}}) {
      auto out = w.open(name);
      write_bin_matrix(*mat, bins, out);
    }
    {
      auto out = w.open("reach_sources.tsv");
      out << "bin\tsources\n";
      for (std::size_t i = 0; i < m.sources_per_bin.size(); ++i)
        out << bin_label(bins, i) << '\t' << m.sources_per_bin[i] << '\n';
    }
    w.stat("sources", m.sample.size());
  } else if (target == "groups") {
    const fs::path jf_path = detail::stage_file(cfg, stage::ingest, "journal_fields.tsv");
    w.input("ingest/journal_fields.tsv", jf_path);
    const JournalFieldMap jf = load_journal_fields(jf_path.string());
    std::unordered_map<std::string, const PaperRecord*> by_pmid;
    for (const auto& p : c.papers) by_pmid.emplace(p.pmid, &p);
    std::vector<KeyedScore> journal, field, weber;
    std::vector<double> all;
    for (const auto& r : c.rows) {
      const PaperRecord& p = *by_pmid.at(r.pmid);
      all.push_back(r.score.score);
      journal.push_back({p.journal, r.score.score});
      const auto& fields = jf.fields(p.journal);
      if (fields.empty()) field.push_back({std::nullopt, r.score.score});
      for (const auto& f : fields) field.push_back({f, r.score.score});
      weber.push_back({std::string(to_string(r.weber)), r.score.score});
    }
    if (all.empty()) throw DataError("no scored papers to summarise");
    {
      auto out = w.open("histogram.tsv");
      detail::write_histogram(histogram(all, cfg.hist_bin_width), out);
    }
    for (const auto& [key, items] : {std::pair{"journal", &journal}, {"field", &field}, {"weber", &weber}}) {
      const auto g = group_summary(*items, cfg.hist_bin_width);
      auto out = w.open("groups_" + std::string(key) + ".tsv");
      auto hist = w.open("groups_" + std::string(key) + "_histograms.tsv");
      detail::write_group_summary(g, out, hist);
      w.stat(std::string(key) + "_excluded", g.excluded);
    }
  } else if (target == "trials") {
    const auto summary = trial_phase_summary(c.papers, c.by_pmid, cfg.n_perm, cfg.seed, cfg.hist_bin_width, cfg.threads);
    {
      auto out = w.open("groups_trial_phase.tsv");
      auto hist = w.open("groups_trial_phase_histograms.tsv");
      detail::write_group_summary(summary.groups, out, hist);
    }
    auto out = w.open("perm_tests.tsv");
    out << "group_a\tgroup_b\tstat\tp\tn_perm\n";
    for (const auto& t : summary.tests) detail::write_perm_row(out, t.group_a, t.group_b, t.result);
  } else if (target == "trajectory") {
    std::vector<TermId> terms;
    for (const auto& name : cfg.trajectory_terms) terms.push_back(c.vocab.id_of(name));
    if (terms.empty()) {
      // Five most frequent terms among scored papers.
      std::map<TermId, std::size_t> freq;
      for (const auto& p : c.papers)
        if (c.by_pmid.contains(p.pmid))
          for (TermId t : p.terms) ++freq[t];
      std::vector<std::pair<std::size_t, TermId>> ranked;
      for (const auto& [t, n] : freq) ranked.emplace_back(n, t);
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
      });
      for (std::size_t k = 0; k < std::min<std::size_t>(5, ranked.size()); ++k) terms.push_back(ranked[k].second);
    }
    detail::require_stage(cfg, stage::embed, "analyze trajectory");
    const LevelTables tables = load_level_tables(cfg, c.vocab, &w);
    auto pts = w.open("trajectory_terms.tsv");
    auto base = w.open("trajectory_baseline.tsv");
    auto pap = w.open("trajectory_papers.tsv");
    pts << "term\tyear\tscore\n";
    base << "year\tmean_term_score\n";
    pap << "term\tyear\tmean\tstd\tn\n";
    bool baseline_written = false;
    for (TermId t : terms) {
      const auto tr = term_trajectory(t, cfg.year_from, cfg.year_to, tables, c.vocab);
      for (const auto& [y, s] : tr.points) pts << c.vocab.name(t) << '\t' << y << '\t' << format_optional(s) << '\n';
      if (!baseline_written) {
        for (const auto& [y, m] : tr.baseline) base << y << '\t' << format_real(m) << '\n';
        baseline_written = true;
      }
      for (const auto& row : papers_with_term_trajectory(t, c.papers, c.by_pmid, cfg.year_from, cfg.year_to)) {
        pap << c.vocab.name(t) << '\t' << row.year << '\t' << format_optional(row.mean) << '\t'
            << format_optional(row.stddev) << '\t' << row.n << '\n';
      }
    }
  } else if (target == "threshold") {
    std::vector<double> all;
    for (const auto& r : c.rows) all.push_back(r.score.score);
    if (all.empty()) throw DataError("no scored papers to summarise");
    const auto h = histogram(all, cfg.hist_bin_width);
    {
      auto out = w.open("histogram.tsv");
      detail::write_histogram(h, out);
    }
    const auto th = detect_threshold(h);
    auto out = w.open("threshold.tsv");
    out << "key\tvalue\n";
    out << "threshold\t" << (th ? format_real(th->value) : "NA") << '\n';
    out << "bin_width\t" << format_real(h.bins.width) << '\n';
    out << "median\t" << format_real(h.median) << '\n';
    out << "fraction_above_threshold\t" << (th ? format_real(fraction_above(all, th->value)) : "NA") << '\n';
    out << "n\t" << h.n << '\n';
  } else if (target == "similarity") {
    detail::require_stage(cfg, stage::embed, "analyze similarity");
    const LevelTables tables = load_level_tables(cfg, c.vocab, &w);
    auto out = w.open("similarity.tsv");
    out << "year\twithin_mean\twithin_median\twithin_pairs\tbetween_mean\tbetween_median\tbetween_pairs\tp\n";
    for (const auto& [t, win] : tables.windows()) {
      const auto s = within_between_similarity(win.embedding, c.vocab, cfg.similarity_pairs,
                                               cfg.seed + static_cast<std::uint64_t>(t), 1000);
      out << t << '\t' << format_real(s.within.mean) << '\t' << format_real(s.within.median) << '\t' << s.within.pairs
          << '\t' << format_real(s.between.mean) << '\t' << format_real(s.between.median) << '\t' << s.between.pairs
          << '\t' << format_real(s.test.p_value) << '\n';
    }
  }
  return w.commit();
}

/// ingest -> cooccur -> embed -> score -> every analysis.
inline std::vector<StageReport> run_all(const PipelineConfig& cfg) {
  std::vector<StageReport> reports;
  reports.push_back(run_ingest(cfg));
  reports.push_back(run_cooccur(cfg));
  reports.push_back(run_embed(cfg));
  reports.push_back(run_score(cfg));
  for (const auto& t : analyze_targets()) reports.push_back(run_analyze(cfg, t));
  return reports;
}

}  // namespace transaxis
