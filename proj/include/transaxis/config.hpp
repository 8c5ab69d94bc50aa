#pragma once

// Plain-text `key = value` pipeline configuration.

#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "transaxis/binning.hpp"
#include "transaxis/core.hpp"
#include "transaxis/corpus.hpp"
#include "transaxis/embed.hpp"

namespace transaxis {

struct PipelineConfig {
  // Input paths; empty means <out>/synth/<default file name>.
  std::string mesh_tree;
  std::string papers;
  std::string citations;
  std::string journal_fields;
  std::string out = "transaxis_out";

  Year year_from = 1980;
  Year year_to = 2013;
  int window = 5;
  VocabularyOptions vocabulary;
  EmbeddingParams embedding;

  double bin_width = 0.1;
  double hist_bin_width = 0.02;
  double sample_fraction = 0.01;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t null_replicates = 100;
  std::uint64_t n_perm = 100000;
  std::uint64_t similarity_pairs = 10000;
  std::vector<std::string> trajectory_terms;

  SyntheticSpec synth{.papers = 20000, .year_from = 1976, .year_to = 2013};

  void validate() const {
    if (window < 1) throw ArgumentError("window length must be at least 1");
    if (year_from > year_to) throw ArgumentError("year range is empty");
    vocabulary.roots.validate();
    if (vocabulary.branches.empty()) throw ArgumentError("at least one admitted branch is required");
    embedding.validate();
    BinningSpec{bin_width}.count();
    BinningSpec{hist_bin_width}.count();
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw ArgumentError("sample fraction must lie in (0, 1]");
    if (threads < 1) throw ArgumentError("threads must be at least 1");
    if (n_perm < 1) throw ArgumentError("n_perm must be at least 1");
    if (out.empty()) throw ArgumentError("output directory must be set");
  }

  Year first_paper_year() const { return year_from - window + 1; }

  bool operator==(const PipelineConfig& o) const { return serialize() == o.serialize(); }

  /// Keys whose values are file locations; they are excluded from the
  /// configuration digest, since inputs are recorded by content instead.
  static bool is_path_key(const std::string& key) {
    return key == "mesh_tree" || key == "papers" || key == "citations" || key == "journal_fields" || key == "out";
  }

  std::vector<std::pair<std::string, std::string>> entries() const {
    auto list = [](const std::vector<std::string>& v, char sep) {
      std::string s;
      for (std::size_t k = 0; k < v.size(); ++k) s += (k ? std::string(1, sep) : "") + v[k];
      return s;
    };
    auto real = [](double x) { return format_real(x, 17); };
    auto u64 = [](std::uint64_t x) { return std::to_string(x); };
    const auto& e = embedding;
    const auto& s = synth;
    return {
        {"mesh_tree", mesh_tree},
        {"papers", papers},
        {"citations", citations},
        {"journal_fields", journal_fields},
        {"out", out},
        {"year_from", std::to_string(year_from)},
        {"year_to", std::to_string(year_to)},
        {"window", std::to_string(window)},
        {"roots.cell_molecular", list(vocabulary.roots.cell_molecular, ',')},
        {"roots.animal", list(vocabulary.roots.animal, ',')},
        {"roots.human", list(vocabulary.roots.human, ',')},
        {"branches", vocabulary.branches},
        {"dim", std::to_string(e.dim)},
        {"samples", u64(e.total_samples)},
        {"samples_per_edge", u64(e.samples_per_edge)},
        {"negatives", std::to_string(e.negatives)},
        {"rho", real(e.initial_rate)},
        {"noise_exponent", real(e.noise_exponent)},
        {"bin_width", real(bin_width)},
        {"hist_bin_width", real(hist_bin_width)},
        {"sample_fraction", real(sample_fraction)},
        {"seed", u64(seed)},
        {"threads", std::to_string(threads)},
        {"null_replicates", u64(null_replicates)},
        {"n_perm", u64(n_perm)},
        {"similarity_pairs", u64(similarity_pairs)},
        {"trajectory_terms", list(trajectory_terms, '|')},
        {"synth.basic_terms", u64(s.basic_terms)},
        {"synth.applied_terms", u64(s.applied_terms)},
        {"synth.cell_seeds", u64(s.cell_seeds)},
        {"synth.animal_seeds", u64(s.animal_seeds)},
        {"synth.human_seeds", u64(s.human_seeds)},
        {"synth.excluded_terms", u64(s.excluded_terms)},
        {"synth.excluded_rate", real(s.excluded_rate)},
        {"synth.papers", u64(s.papers)},
        {"synth.min_terms", u64(s.min_terms)},
        {"synth.max_terms", u64(s.max_terms)},
        {"synth.mixing", real(s.mixing)},
        {"synth.applied_fraction", real(s.applied_fraction)},
        {"synth.year_from", std::to_string(s.year_from)},
        {"synth.year_to", std::to_string(s.year_to)},
        {"synth.refs_per_paper", u64(s.refs_per_paper)},
        {"synth.citation_homophily", real(s.citation_homophily)},
        {"synth.trial_fraction", real(s.trial_fraction)},
        {"synth.journals_per_community", u64(s.journals_per_community)},
    };
  }

  std::string serialize() const {
    std::string out_text;
    for (const auto& [k, v] : entries()) out_text += k + " = " + v + "\n";
    return out_text;
  }

  /// Serialization without path keys.
  std::string digest_text() const {
    std::string text;
    for (const auto& [k, v] : entries())
      if (!is_path_key(k)) text += k + " = " + v + "\n";
    return text;
  }

  void set(const std::string& key, const std::string& value) {
    auto list = [&](char sep) {
      std::vector<std::string> v;
      if (trim(value).empty()) return v;
      for (auto part : split(value, sep)) {
        auto t = trim(part);
        if (!t.empty()) v.emplace_back(t);
      }
      return v;
    };
    auto integer = [&]() {
      try {
        return parse_integer(value, key);
      } catch (const DataError& e) {
        throw ArgumentError(e.what());
      }
    };
    auto count = [&]() {
      const auto v = integer();
      if (v < 0) throw ArgumentError(key + " must not be negative");
      return static_cast<std::uint64_t>(v);
    };
    auto real = [&]() {
      try {
        const double v = parse_real(value, key);
        if (!std::isfinite(v)) throw ArgumentError(key + " must be finite");
        return v;
      } catch (const DataError& e) {
        throw ArgumentError(e.what());
      }
    };
    auto& e = embedding;
    auto& s = synth;
    const std::string v(trim(value));
    if (key == "mesh_tree") mesh_tree = v;
    else if (key == "papers") papers = v;
    else if (key == "citations") citations = v;
    else if (key == "journal_fields") journal_fields = v;
    else if (key == "out") out = v;
    else if (key == "year_from") year_from = static_cast<Year>(integer());
    else if (key == "year_to") year_to = static_cast<Year>(integer());
    else if (key == "window") window = static_cast<int>(integer());
    else if (key == "roots.cell_molecular") vocabulary.roots.cell_molecular = list(',');
    else if (key == "roots.animal") vocabulary.roots.animal = list(',');
    else if (key == "roots.human") vocabulary.roots.human = list(',');
    else if (key == "branches") vocabulary.branches = v;
    else if (key == "dim") e.dim = static_cast<int>(integer());
    else if (key == "samples") e.total_samples = count();
    else if (key == "samples_per_edge") e.samples_per_edge = count();
    else if (key == "negatives") e.negatives = static_cast<int>(integer());
    else if (key == "rho") e.initial_rate = real();
    else if (key == "noise_exponent") e.noise_exponent = real();
    else if (key == "bin_width") bin_width = real();
    else if (key == "hist_bin_width") hist_bin_width = real();
    else if (key == "sample_fraction") sample_fraction = real();
    else if (key == "seed") seed = count();
    else if (key == "threads") threads = static_cast<unsigned>(count());
    else if (key == "null_replicates") null_replicates = count();
    else if (key == "n_perm") n_perm = count();
    else if (key == "similarity_pairs") similarity_pairs = count();
    else if (key == "trajectory_terms") trajectory_terms = list('|');
    else if (key == "synth.basic_terms") s.basic_terms = count();
    else if (key == "synth.applied_terms") s.applied_terms = count();
    else if (key == "synth.cell_seeds") s.cell_seeds = count();
    else if (key == "synth.animal_seeds") s.animal_seeds = count();
    else if (key == "synth.human_seeds") s.human_seeds = count();
    else if (key == "synth.excluded_terms") s.excluded_terms = count();
    else if (key == "synth.excluded_rate") s.excluded_rate = real();
    else if (key == "synth.papers") s.papers = count();
    else if (key == "synth.min_terms") s.min_terms = count();
    else if (key == "synth.max_terms") s.max_terms = count();
    else if (key == "synth.mixing") s.mixing = real();
    else if (key == "synth.applied_fraction") s.applied_fraction = real();
    else if (key == "synth.year_from") s.year_from = static_cast<Year>(integer());
    else if (key == "synth.year_to") s.year_to = static_cast<Year>(integer());
    else if (key == "synth.refs_per_paper") s.refs_per_paper = count();
    else if (key == "synth.citation_homophily") s.citation_homophily = real();
    else if (key == "synth.trial_fraction") s.trial_fraction = real();
    else if (key == "synth.journals_per_community") s.journals_per_community = count();
    else throw ArgumentError("unknown configuration key '" + key + "'");
  }

  static PipelineConfig parse(std::istream& in, const std::string& source) {
    PipelineConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto row = trim(line);
      if (row.empty() || row.front() == '#') continue;
      const auto eq = row.find('=');
      if (eq == std::string_view::npos) {
        throw ArgumentError(source + ":" + std::to_string(lineno) + ": expected key = value");
      }
      try {
        c.set(std::string(trim(row.substr(0, eq))), std::string(trim(row.substr(eq + 1))));
      } catch (const ArgumentError& e) {
        throw ArgumentError(source + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return c;
  }

  static PipelineConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in, "<config>");
  }

  static PipelineConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config file '" + path + "'");
    return parse(in, path);
  }
};

}  // namespace transaxis
