#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "apirank/features.hpp"
#include "apirank/vsm.hpp"

namespace apirank {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pairwise training data: one feature row per touched (project, api) pair
/// and triples (positive row, negative row) meaning the project prefers the
/// positive api.
class TrainingSet {
 public:
  struct Triple {
    std::int32_t pos;  // row of (p, a), a used by p
    std::int32_t neg;  // row of (p, a'), a' not used by p
  };
  struct RowInfo {
    std::int32_t project;  // index into project_ids
    std::int32_t api;      // catalog position
    bool label;            // y(p,a)
  };

  int dim = 0;
  std::vector<double> rows;       // row-major, rows.size() == n_rows * dim
  std::vector<RowInfo> row_info;  // aligned with rows
  std::vector<Triple> triples;
  std::vector<std::string> project_ids;
  int projects_skipped = 0;  // projects with no negative api available

  std::size_t n_rows() const { return row_info.size(); }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(rows).subspan(r * static_cast<std::size_t>(dim),
                                                 static_cast<std::size_t>(dim));
  }
};

/// Number of negatives drawn per positive; nullopt means every unused api.
using NegativeRate = std::optional<int>;
inline constexpr NegativeRate kAllNegatives = std::nullopt;

/// One training project ready for triple construction.
struct TrainingProject {
  std::string id;
  FeatureExtractor::Context context;
  std::vector<std::string> used_apis;
};

/// Builds the triple set for the given training projects. With a rate, the
/// negatives are drawn seeded-uniform without replacement per positive, from
/// the substream "negatives/<project id>" of `seed`. Projects that use every
/// api are skipped and counted.
TrainingSet build_triples(const std::vector<TrainingProject>& projects,
                          const FeatureExtractor& extractor, NegativeRate negative_rate,
                          std::uint64_t seed);

/// f = theta . x
double score(std::span<const double> theta, std::span<const double> x);

/// Regularized squared-hinge pairwise loss over the triple set:
/// R = (1/|D|) sum max(0, 1 - (f_pos - f_neg))^2 + (lambda/2) |theta|^2
/// and its exact gradient.
struct LossGrad {
  double value = 0.0;
  std::vector<double> grad;
};
LossGrad loss_and_gradient(std::span<const double> theta, const TrainingSet& data, double lambda);

/// Generalized-Hessian product: Hv = (2/|D|) sum_{active} (dx . v) dx + lambda v,
/// with the active set (margin > 0) frozen at `theta`.
std::vector<double> hessian_vector_product(std::span<const double> theta, const TrainingSet& data,
                                           double lambda, std::span<const double> v);

struct TrainOptions {
  int max_outer = 100;
  double grad_tol = 1e-4;        // infinity norm stopping criterion
  double cg_forcing = 0.1;       // inner solve tolerance: cg_forcing * |grad|
  int cg_max_iter = 250;
  int max_line_search = 30;      // backtracking halvings
  std::vector<double> theta0;    // empty = zeros
};

struct TrainResult {
  std::vector<double> theta;
  std::vector<double> objective_trace;  // R after each outer iteration, R(theta0) first
  int outer_iterations = 0;
  bool converged = false;
  double grad_inf_norm = 0.0;
};

/// Minimizes R by truncated Newton: conjugate-gradient inner solves on the
/// generalized Hessian plus an Armijo backtracking line search. R is strictly
/// convex (lambda > 0), so the optimum is unique. Deterministic.
TrainResult train(const TrainingSet& data, double lambda, const TrainOptions& options = {});

struct ScoredApi {
  std::string api_id;
  double score = 0.0;
};
using RankedList = std::vector<ScoredApi>;

/// Model config persisted next to the weights so deployment preprocessing
/// matches training.
struct ModelConfig {
  std::vector<int> k_grid = {5, 10, 15, 20, 25};
  std::uint64_t seed = 42;
  std::string log_base = "e";
  std::string noun_filter = "heuristic";
  bool include_project_name = false;
};

/// Everything needed to rank apis for a new project profile.
struct RankingModel {
  std::vector<double> theta;
  double lambda = 1.0;
  Vocabulary vocab;
  NeighborIndex index;
  ApiCatalog apis;
  ModelConfig config;
};

/// Scores every api in the catalog and sorts descending; equal scores are
/// ordered by the seeded tie permutation (substream "ties" of the seed).
RankedList rank_apis(const RankingModel& model, const ProjectQuery& query);

/// Shared by rank_apis and the baselines so equal-score orders coincide.
std::vector<int> api_tie_permutation(std::uint64_t seed, std::size_t n_apis);
RankedList sort_scored_apis(const std::vector<std::string>& ids, std::vector<double> scores,
                            const std::vector<int>& tie_rank);

void save_model(const RankingModel& model, const std::filesystem::path& path);
RankingModel load_model(const std::filesystem::path& path);

}  // namespace apirank
