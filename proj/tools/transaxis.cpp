// transaxis: command-line driver for the level-score pipeline.
//
//   transaxis synth    --out run
//   transaxis ingest   --out run
//   transaxis cooccur  --out run
//   transaxis embed    --out run
//   transaxis score    --out run
//   transaxis analyze  heatmap|reach|groups|trials|trajectory|threshold|similarity --out run
//   transaxis pipeline --out run        (ingest through every analysis)
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "transaxis/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<int> from, to, window, dim, negatives;
  std::optional<std::uint64_t> samples, seed, papers, n_perm;
  std::optional<double> bin_width, sample_fraction, mixing;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::vector<std::string> terms;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Plain-text key=value configuration file");
  cmd->add_option("--from", o.from, "First window end year");
  cmd->add_option("--to", o.to, "Last window end year");
  cmd->add_option("--window", o.window, "Window length in years");
  cmd->add_option("--dim", o.dim, "Embedding dimension");
  cmd->add_option("--negatives", o.negatives, "Negative samples per edge");
  cmd->add_option("--samples", o.samples, "Training samples per window (0 = 100 x edges)");
  cmd->add_option("--bin-width", o.bin_width, "Level-score bin width for citation analyses");
  cmd->add_option("--sample-fraction", o.sample_fraction, "Fraction of papers used as reachability sources");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--threads", o.threads, "Worker threads (1 = fully deterministic)");
  cmd->add_option("--out", o.out, "Output directory");
}

transaxis::PipelineConfig resolve(const Overrides& o) {
  using transaxis::PipelineConfig;
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : PipelineConfig::load(o.config);
  if (o.from) c.year_from = *o.from;
  if (o.to) c.year_to = *o.to;
  if (o.window) c.window = *o.window;
  if (o.dim) c.embedding.dim = *o.dim;
  if (o.negatives) c.embedding.negatives = *o.negatives;
  if (o.samples) c.embedding.total_samples = *o.samples;
  if (o.bin_width) c.bin_width = *o.bin_width;
  if (o.sample_fraction) c.sample_fraction = *o.sample_fraction;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.out) c.out = *o.out;
  if (o.papers) c.synth.papers = *o.papers;
  if (o.mixing) c.synth.mixing = *o.mixing;
  if (o.n_perm) c.n_perm = *o.n_perm;
  if (!o.terms.empty()) c.trajectory_terms = o.terms;
  c.validate();
  return c;
}

void report(const transaxis::StageReport& r) {
  std::cerr << "[" << r.stage << "] wrote " << r.outputs.size() << " files to " << r.directory.string() << '\n';
  for (const auto& [k, v] : r.stats) std::cerr << "  " << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level scores of controlled-vocabulary terms and papers on a basic-applied axis"};
  app.require_subcommand(1);
  Overrides o;
  std::string target;

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with two planted term communities");
  add_common(synth, o);
  synth->add_option("--papers", o.papers, "Number of synthetic papers");
  synth->add_option("--mixing", o.mixing, "Cross-community term mixing rate in [0,1]");
  auto* ingest = app.add_subcommand("ingest", "Load and validate vocabulary, papers, citations, journal fields");
  auto* cooccur = app.add_subcommand("cooccur", "Build per-window co-occurrence matrices");
  auto* embed = app.add_subcommand("embed", "Train per-window term embeddings");
  auto* score = app.add_subcommand("score", "Build axes and score terms and papers");
  auto* analyze = app.add_subcommand("analyze", "Run one analysis over scored papers");
  auto* pipeline = app.add_subcommand("pipeline", "Run ingest through every analysis");
  for (auto* cmd : {ingest, cooccur, embed, score, analyze, pipeline}) add_common(cmd, o);
  analyze->add_option("target", target, "heatmap|reach|groups|trials|trajectory|threshold|similarity")
      ->required()
      ->check(CLI::IsMember(transaxis::analyze_targets()));
  for (auto* cmd : {analyze, pipeline}) {
    cmd->add_option("--term", o.terms, "Term for trajectory output (repeatable)");
    cmd->add_option("--n-perm", o.n_perm, "Permutations for permutation tests");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(transaxis::ExitCode::usage);
  }

  try {
    const auto cfg = resolve(o);
    if (synth->parsed()) report(transaxis::run_synth(cfg));
    if (ingest->parsed()) report(transaxis::run_ingest(cfg));
    if (cooccur->parsed()) report(transaxis::run_cooccur(cfg));
    if (embed->parsed()) report(transaxis::run_embed(cfg));
    if (score->parsed()) report(transaxis::run_score(cfg));
    if (analyze->parsed()) report(transaxis::run_analyze(cfg, target));
    if (pipeline->parsed()) {
      for (const auto& r : transaxis::run_all(cfg)) report(r);
    }
  } catch (const transaxis::Error& e) {
    std::cerr << "transaxis: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "transaxis: " << e.what() << '\n';
    return static_cast<int>(transaxis::ExitCode::data);
  } catch (const std::exception& e) {
    std::cerr << "transaxis: " << e.what() << '\n';
    return static_cast<int>(transaxis::ExitCode::data);
  }
  return 0;
}
