#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rstlab/corpus.hpp"
#include "rstlab/metrics.hpp"
#include "rstlab/relmap.hpp"

namespace rstlab {

// How the main model is trained.
//   plain        train on the train refs only
//   concat       same mechanics; names a config whose train refs pool corpora
//   tagger_label window tagger trained on the base (or train) docs predicts
//                dependency labels which are stacked as features
//   sr_label     a base parser's predicted dependency labels are stacked
//   sr_graph     as sr_label but stacking direction + distance instead
//   warm_start   base parser's weights seed continued training on train
enum class Regime { plain, concat, tagger_label, sr_label, sr_graph, warm_start };

Regime regime_from(const std::string& name);
const char* regime_name(Regime r);
bool regime_needs_base(Regime r);

// A document inside a named corpus of the registry.
struct DocRef {
  std::string corpus;
  std::string doc_id;

  bool operator==(const DocRef&) const = default;
  bool operator<(const DocRef& o) const {
    return corpus != o.corpus ? corpus < o.corpus : doc_id < o.doc_id;
  }
};

// One scored group of held-out documents, reported as its own row.
struct TestTarget {
  std::string name;
  std::vector<DocRef> docs;
};

// Filesystem location of a corpus, for configs driven from the CLI.
struct CorpusPaths {
  std::string root;
  std::string manifest;
};

struct ExperimentConfig {
  std::string name;
  Regime regime = Regime::plain;
  int runs = 3;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int max_epochs = 20;
  int patience = 5;
  bool organizational = true;
  // Permits train/test overlap for memorization self-checks; leakage is
  // rejected otherwise.
  bool self_test = false;
  std::string out_dir;   // empty: keep everything in memory
  std::string baseline;  // report name this one is compared against, if any

  std::vector<DocRef> train;
  std::vector<DocRef> dev;  // empty: a stratified tenth of train is carved off
  std::vector<DocRef> base_train;
  std::vector<DocRef> base_dev;
  std::vector<TestTarget> tests;

  std::map<std::string, Collapse> collapse;     // per corpus key
  std::map<std::string, CorpusPaths> corpora;   // per corpus key
};

// Throws BadManifest on structural problems (run/seed count skew, missing
// base refs for a regime that needs them, duplicate refs) and
// LeakageDetected when a test document also appears in train, dev,
// base_train, or base_dev.
void validate_config(const ExperimentConfig& config);

// Line format: "key = value" or "key qualifier = value"; '#' comments.
// Doc refs are written corpus:doc_id. Repeated ref keys accumulate.
ExperimentConfig parse_experiment_config(const std::string& text);
std::string write_experiment_config(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::string& path);

using CorpusRegistry = std::map<std::string, const Corpus*>;

struct RunScore {
  int run = 0;  // 0-based
  std::uint64_t seed = 0;
  std::string target;
  ScoreTriple triple;
};

struct TargetMean {
  std::string target;
  ScoreTriple mean;
};

// Per-run rows are stored run-major in target order; with several targets
// synthesized "micro" (pooled) and "macro" (unweighted by genre) rows
// follow the named ones. Means fold the per-run rows in storage order.
struct ScoreReport {
  std::string name;
  int runs = 0;
  std::vector<std::string> targets;
  std::vector<RunScore> per_run;
  std::vector<TargetMean> means;
};

// Recomputes the means from per_run with the same fold; equal to
// report.means bitwise.
std::vector<TargetMean> recompute_means(const ScoreReport& report);

std::string report_csv(const ScoreReport& report);

struct DegradationRow {
  std::string target;
  ScoreTriple baseline;
  ScoreTriple score;
  ScoreTriple delta;  // baseline - score; negative means improvement
};

// Rows for every target name the two reports share, in the second report's
// order.
std::vector<DegradationRow> degradation(const ScoreReport& baseline, const ScoreReport& report);
std::string degradation_csv(const std::vector<DegradationRow>& rows);

struct RunOptions {
  int jobs = 1;  // concurrent runs
  const MappingTable* mapping = nullptr;  // loaded on demand when collapsing
  bool quiet = true;
};

// Trains per the regime, parses every target, scores each run, and folds
// the report. With out_dir set, writes
// <out_dir>/<name>/<seed>/{model.bin, report.csv, parses/*.rs3, parses/*.rsd}
// plus the combined <out_dir>/<name>/{config.cfg, report.csv}.
ScoreReport run_experiment(const ExperimentConfig& config, const CorpusRegistry& registry,
                           const RunOptions& opts = {});

// Indices of every tenth document in the order sorted by (edu_count, id);
// empty when fewer than two documents.
std::vector<int> stratified_dev_indices(const std::vector<std::pair<int, std::string>>& docs);

// Train on every genre's train partition except the held-out one; test on
// the held-out genre's dev+test documents. Throws UnknownGenre.
ExperimentConfig build_ova(const Corpus& corpus, const std::string& corpus_key,
                           const std::string& held_out_genre);

// In-domain reference for the same held-out genre: train on every genre's
// train partition, averaged over five runs.
ExperimentConfig build_baseline(const Corpus& corpus, const std::string& corpus_key,
                                const std::string& genre);

// Train on the train partitions of every genre outside `growing`; one test
// target per growing genre present. A corpus without any of them gets an
// empty test list and a warning.
ExperimentConfig build_all_large(const Corpus& corpus, const std::string& corpus_key,
                                 const std::vector<std::string>& growing = {"conversation", "speech",
                                                                            "textbook", "vlog"},
                                 std::vector<std::string>* warnings = nullptr);

struct CohortGenre {
  std::string genre;
  int docs = 0;
};

struct CohortSpec {
  std::string name;
  std::vector<CohortGenre> rows;
};

struct CohortOptions {
  // With a target, each cohort picks the document subset whose EDU total
  // lands closest to it (ties toward the smaller total); without one, the
  // lexicographically first documents are taken as-is. Totals must end up
  // pairwise within the tolerance.
  int target_edus = 0;
  int tolerance = 0;
};

// Equal-budget training cohorts drawn from all partitions of their genres,
// each tested on the dev+test documents of every genre no cohort uses.
// Selection is deterministic: lexicographically first among the qualifying
// subsets. Throws InfeasibleBudget.
std::vector<ExperimentConfig> build_fixed_cohorts(const Corpus& corpus,
                                                  const std::string& corpus_key,
                                                  const std::vector<CohortSpec>& specs,
                                                  const CohortOptions& opts = {});

}  // namespace rstlab
