#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "apirank/vsm.hpp"

namespace apirank {

/// |k1 ∩ k2| / sqrt(|k1|·|k2|) over sorted unique keyword vectors; 0 when
/// either set is empty. Symmetric, in [0,1], and 1 iff the sets are equal.
double keyword_similarity(const std::vector<std::string>& k1, const std::vector<std::string>& k2);

enum class Channel { text, keyword };

/// Snapshot of the training-fold projects a query is matched against: their
/// text vectors, keyword sets, and usage links. Never contains test projects.
struct NeighborIndex {
  struct Entry {
    std::string project_id;
    SparseVector text_vec;
    std::vector<std::string> keywords;  // sorted, unique
    std::unordered_set<std::string> used_apis;
  };

  std::vector<Entry> entries;
  std::vector<int> tie_rank;  // seeded permutation; breaks equal-similarity ties
  std::uint64_t seed = 0;

  std::size_t size() const { return entries.size(); }
  void finalize(std::uint64_t seed);  // fills tie_rank
};

/// Query side of neighbor search and feature extraction. `exclude_id` keeps a
/// training project from matching itself.
struct ProjectQuery {
  SparseVector text_vec;
  std::vector<std::string> keywords;
  std::string exclude_id;
};

/// All eligible entry positions ordered by descending channel similarity,
/// ties broken by the index's seeded permutation.
std::vector<int> neighbor_order(const ProjectQuery& query, const NeighborIndex& index,
                                Channel channel);

/// Top-k training project ids by channel similarity. Throws
/// std::invalid_argument when fewer than k projects are eligible.
std::vector<std::string> top_k_projects(const ProjectQuery& query, const NeighborIndex& index,
                                        int k, Channel channel);

/// Fraction of the k nearest neighbors that use the api.
double cf_score(const ProjectQuery& query, const std::string& api_id, int k, Channel channel,
                const NeighborIndex& index);

/// Deployment-side api data aligned by position.
struct ApiCatalog {
  std::vector<std::string> ids;
  std::vector<SparseVector> text_vecs;
  std::vector<std::vector<std::string>> keywords;  // sorted, unique
  std::unordered_map<std::string, int> id_to_pos;

  std::size_t size() const { return ids.size(); }
  void finalize();  // fills id_to_pos
};

/// Computes the interaction feature vector for (project, api) pairs:
/// one text-channel and one keyword-channel CF score per k in the grid,
/// then text cosine similarity and keyword similarity. With the default
/// grid {5,10,15,20,25} the layout is x1..x5 = CF text, x6..x10 = CF
/// keyword, x11 = text similarity, x12 = keyword similarity.
class FeatureExtractor {
 public:
  FeatureExtractor(const NeighborIndex& index, const ApiCatalog& apis, std::vector<int> k_grid);

  int dim() const { return static_cast<int>(2 * k_grid_.size() + 2); }
  const std::vector<int>& k_grid() const { return k_grid_; }
  const ApiCatalog& apis() const { return apis_; }
  const NeighborIndex& index() const { return index_; }

  /// Per-query neighbor state, computed once and reused across all apis.
  struct Context {
    ProjectQuery query;
    std::vector<int> text_order;  // neighbor positions, best first, max-k prefix
    std::vector<int> key_order;
  };
  Context make_context(ProjectQuery query) const;

  /// Feature vector for one (project, api) pair.
  std::vector<double> extract(const Context& ctx, int api_pos) const;

  /// Row-major |apis| x dim feature matrix for one project; the CF counting
  /// is inverted over the neighbor lists so the cost is O(k·|A_p| + |A|).
  std::vector<double> extract_all(const Context& ctx) const;

 private:
  const NeighborIndex& index_;
  const ApiCatalog& apis_;
  std::vector<int> k_grid_;
};

/// One-pair convenience wrapper over FeatureExtractor.
std::vector<double> extract_features(const ProjectQuery& query, const std::string& api_id,
                                     const NeighborIndex& index, const ApiCatalog& apis,
                                     const std::vector<int>& k_grid);

/// Column names matching the extractor layout, e.g. cf_text_k5, sim_text.
std::vector<std::string> feature_names(const std::vector<int>& k_grid);

}  // namespace apirank
