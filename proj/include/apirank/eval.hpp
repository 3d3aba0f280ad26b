#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "apirank/pipeline.hpp"

namespace apirank {

/// 1 iff any of the first n entries is in the truth set.
int hit_at_n(const RankedList& ranked, const std::unordered_set<std::string>& truth, int n);

/// Average precision: sum_i P(i)·rel(i) / sum_i rel(i) over the first M
/// entries, where M is the cutoff (nullopt = full list). 0 when no relevant
/// item falls within M.
double average_precision(const RankedList& ranked, const std::unordered_set<std::string>& truth,
                         std::optional<int> cutoff = std::nullopt);

/// 1/rank of the first relevant entry; 0 when none is present.
double reciprocal_rank(const RankedList& ranked, const std::unordered_set<std::string>& truth);

/// Metric bundle for one ranked list or averaged across projects/folds.
struct MetricSuite {
  std::map<int, double> hit_at;  // N -> Hit@N
  std::map<int, double> map_at;  // N -> MAP@N
  double map = 0.0;
  double mrr = 0.0;
};

MetricSuite score_ranking(const RankedList& ranked, const std::unordered_set<std::string>& truth,
                          const std::vector<int>& hit_ns);
MetricSuite mean_suite(const std::vector<MetricSuite>& suites);

/// Seeded partition of 0..n-1 into `folds` parts; sizes differ by at most one
/// and every element is covered exactly once.
struct FoldPlan {
  std::vector<std::vector<int>> folds;
  std::uint64_t seed = 0;
};
FoldPlan make_fold_plan(int n_projects, int folds, std::uint64_t seed);

/// Global popularity ranking from training usage counts; the same list is
/// served to every test project.
RankedList baseline_poprec(const Corpus& corpus, const std::vector<int>& train_projects,
                           const ApiCatalog& apis, std::uint64_t seed);

/// Pure text-similarity ranking: descending cosine between the project and
/// api documents. Equals rank_apis with all weight on the text-similarity
/// feature.
RankedList baseline_exemplar(const ProjectQuery& query, const ApiCatalog& apis,
                             std::uint64_t seed);

struct EvalConfig {
  RunConfig run;
  std::vector<int> hit_ns = {5, 10};
  bool baselines = false;
  std::vector<double> sweep_fractions;  // empty = no sweep
};

struct FoldOutcome {
  int fold = 0;
  int n_test = 0;
  MetricSuite model;
  std::optional<MetricSuite> poprec;
  std::optional<MetricSuite> exemplar;
  std::vector<double> theta;
  std::size_t n_triples = 0;
  int outer_iterations = 0;
  double final_objective = 0.0;
  double train_seconds = 0.0;        // wall clock, reported but never serialized
  double rank_seconds_per_project = 0.0;
};

struct SweepRow {
  double fraction = 0.0;
  int n_train = 0;
  MetricSuite metrics;
};

struct EvalReport {
  std::vector<FoldOutcome> folds;
  MetricSuite aggregate;
  std::optional<MetricSuite> poprec_aggregate;
  std::optional<MetricSuite> exemplar_aggregate;
  std::vector<double> mean_theta;  // averaged across folds
  std::vector<std::string> feature_labels;
  std::vector<SweepRow> sweep;
  std::vector<int> hit_ns;
  double mean_train_seconds = 0.0;
  double mean_rank_seconds_per_project = 0.0;
};

/// K-fold cross validation: per fold, fits vocabulary/index/popularity on the
/// training parts, trains the ranking model, ranks every api for each test
/// project, and scores Hit@N / MAP@N / MAP / MRR. Requires at least `folds`
/// projects (each with ground-truth usage).
EvalReport run_cv(const Corpus& corpus, const EvalConfig& config);

/// Fixed test fold (fold 0), nested seeded training subsets per fraction.
std::vector<SweepRow> training_size_sweep(const Corpus& corpus,
                                          const std::vector<double>& fractions,
                                          const EvalConfig& config);

/// Deterministic serializations; wall-clock timings are deliberately omitted
/// so repeated runs with one seed are byte-identical.
std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace apirank
