#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "apirank/corpus.hpp"
#include "apirank/ranker.hpp"

namespace apirank {

/// Run-wide configuration shared by the cli, trainer, and evaluator.
struct RunConfig {
  double lambda = 1.0;
  std::vector<int> k_grid = {5, 10, 15, 20, 25};
  std::optional<int> negative_rate;   // nullopt = auto (all, or 10 over budget)
  bool negative_rate_is_auto = true;  // false once set explicitly
  long long triple_budget = 2'000'000;
  std::uint64_t seed = 42;
  int top_n = 10;
  int folds = 10;
  std::string noun_filter = "heuristic";
  std::string stoplist_path;  // empty = embedded SMART list
  bool include_project_name = false;

  void validate() const;  // throws std::invalid_argument on bad values
};

/// Token bags for every record of a corpus; fold independent.
struct CorpusDocs {
  std::vector<TokenBag> api_bags;      // aligned with corpus.apis
  std::vector<TokenBag> project_bags;  // aligned with corpus.projects
};
CorpusDocs build_docs(const Corpus& corpus, const RunConfig& config);

/// Everything fitted on one training split: the shared vocabulary (api docs +
/// training project docs), api catalog, and neighbor index.
struct FoldAssets {
  Vocabulary vocab;
  ApiCatalog apis;
  NeighborIndex index;
  std::vector<SparseVector> train_vecs;  // aligned with train_projects
  std::vector<int> train_projects;       // corpus project positions, ascending
};
FoldAssets fit_fold(const Corpus& corpus, const CorpusDocs& docs,
                    std::vector<int> train_projects, const RunConfig& config);

/// Resolves the auto negative-rate policy against the full triple count.
NegativeRate resolve_negative_rate(const Corpus& corpus, const std::vector<int>& train_projects,
                                   const RunConfig& config);

/// Training projects assembled for build_triples.
std::vector<TrainingProject> make_training_projects(const Corpus& corpus,
                                                    const FoldAssets& assets,
                                                    const FeatureExtractor& extractor);

struct TrainOutcome {
  RankingModel model;
  TrainResult optimization;
  std::size_t n_triples = 0;
  int projects_skipped = 0;
};

/// Full training pipeline over all projects of a cleaned corpus. When
/// `captured_set` is given, the training matrix is moved there afterwards
/// (for the csv dump).
TrainOutcome train_pipeline(const Corpus& corpus, const RunConfig& config,
                            const TrainOptions& options = {},
                            TrainingSet* captured_set = nullptr);

/// Builds the query for a raw profile using the model's stored preprocessing
/// configuration and vocabulary.
ProjectQuery make_query(const RankingModel& model, std::string_view description,
                        const std::vector<std::string>& keywords);

/// Ranks all apis for a raw profile and truncates to top_n (0 = full list).
RankedList recommend(const RankingModel& model, std::string_view description,
                     const std::vector<std::string>& keywords, int top_n);

/// Writes the training feature matrix as csv:
/// project_id,api_id,<feature names>,label
void dump_feature_matrix(const TrainingSet& set, const ApiCatalog& apis,
                         const std::vector<int>& k_grid, const std::filesystem::path& path);

}  // namespace apirank
