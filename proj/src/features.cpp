#include "apirank/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apirank/rng.hpp"

namespace apirank {

double keyword_similarity(const std::vector<std::string>& k1,
                          const std::vector<std::string>& k2) {
  if (k1.empty() || k2.empty()) return 0.0;
  std::size_t shared = 0;
  auto i1 = k1.begin();
  auto i2 = k2.begin();
  while (i1 != k1.end() && i2 != k2.end()) {
    if (*i1 < *i2) {
      ++i1;
    } else if (*i2 < *i1) {
      ++i2;
    } else {
      ++shared;
      ++i1;
      ++i2;
    }
  }
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(k1.size()) * static_cast<double>(k2.size()));
}

void NeighborIndex::finalize(std::uint64_t index_seed) {
  seed = index_seed;
  tie_rank = seeded_permutation(entries.size(), substream_seed(seed, "neighbor-ties"));
}

void ApiCatalog::finalize() {
  id_to_pos.clear();
  for (std::size_t i = 0; i < ids.size(); ++i) id_to_pos.emplace(ids[i], static_cast<int>(i));
}

namespace {

double channel_similarity(const ProjectQuery& query, const NeighborIndex::Entry& entry,
                          Channel channel) {
  return channel == Channel::text ? cosine(query.text_vec, entry.text_vec)
                                  : keyword_similarity(query.keywords, entry.keywords);
}

}  // namespace

std::vector<int> neighbor_order(const ProjectQuery& query, const NeighborIndex& index,
                                Channel channel) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!query.exclude_id.empty() && index.entries[i].project_id == query.exclude_id) continue;
    scored.emplace_back(channel_similarity(query, index.entries[i], channel),
                        static_cast<int>(i));
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return index.tie_rank[static_cast<std::size_t>(a.second)] <
           index.tie_rank[static_cast<std::size_t>(b.second)];
  });
  std::vector<int> order;
  order.reserve(scored.size());
  for (const auto& [sim, pos] : scored) order.push_back(pos);
  return order;
}

std::vector<std::string> top_k_projects(const ProjectQuery& query, const NeighborIndex& index,
                                        int k, Channel channel) {
  if (k <= 0) throw std::invalid_argument("top_k_projects: k must be positive");
  const std::vector<int> order = neighbor_order(query, index, channel);
  if (static_cast<std::size_t>(k) > order.size()) {
    throw std::invalid_argument("top_k_projects: k=" + std::to_string(k) +
                                " exceeds the " + std::to_string(order.size()) +
                                " eligible projects");
  }
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    ids.push_back(index.entries[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]
                      .project_id);
  return ids;
}

double cf_score(const ProjectQuery& query, const std::string& api_id, int k, Channel channel,
                const NeighborIndex& index) {
  if (k <= 0) throw std::invalid_argument("cf_score: k must be positive");
  const std::vector<int> order = neighbor_order(query, index, channel);
  if (static_cast<std::size_t>(k) > order.size()) {
    throw std::invalid_argument("cf_score: k=" + std::to_string(k) + " exceeds the " +
                                std::to_string(order.size()) + " eligible projects");
  }
  int used = 0;
  for (int i = 0; i < k; ++i) {
    if (index.entries[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]
            .used_apis.contains(api_id))
      ++used;
  }
  return static_cast<double>(used) / static_cast<double>(k);
}

FeatureExtractor::FeatureExtractor(const NeighborIndex& index, const ApiCatalog& apis,
                                   std::vector<int> k_grid)
    : index_(index), apis_(apis), k_grid_(std::move(k_grid)) {
  if (k_grid_.empty()) throw std::invalid_argument("feature k-grid must not be empty");
  for (std::size_t i = 0; i + 1 < k_grid_.size(); ++i) {
    if (k_grid_[i] >= k_grid_[i + 1])
      throw std::invalid_argument("feature k-grid must be strictly increasing");
  }
  if (k_grid_.front() <= 0) throw std::invalid_argument("feature k-grid must be positive");
}

FeatureExtractor::Context FeatureExtractor::make_context(ProjectQuery query) const {
  const int k_max = k_grid_.back();
  Context ctx;
  ctx.query = std::move(query);
  ctx.text_order = neighbor_order(ctx.query, index_, Channel::text);
  ctx.key_order = neighbor_order(ctx.query, index_, Channel::keyword);
  if (ctx.text_order.size() < static_cast<std::size_t>(k_max)) {
    throw std::invalid_argument("neighbor index has " + std::to_string(ctx.text_order.size()) +
                                " eligible projects, need at least " + std::to_string(k_max));
  }
  ctx.text_order.resize(static_cast<std::size_t>(k_max));
  ctx.key_order.resize(static_cast<std::size_t>(k_max));
  return ctx;
}

std::vector<double> FeatureExtractor::extract(const Context& ctx, int api_pos) const {
  const auto& api_id = apis_.ids[static_cast<std::size_t>(api_pos)];
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(dim()));

  for (const std::vector<int>* order : {&ctx.text_order, &ctx.key_order}) {
    int used = 0;
    std::size_t next = 0;
    for (const int k : k_grid_) {
      for (; next < static_cast<std::size_t>(k); ++next) {
        if (index_.entries[static_cast<std::size_t>((*order)[next])].used_apis.contains(api_id))
          ++used;
      }
      x.push_back(static_cast<double>(used) / static_cast<double>(k));
    }
  }

  x.push_back(cosine(ctx.query.text_vec, apis_.text_vecs[static_cast<std::size_t>(api_pos)]));
  x.push_back(
      keyword_similarity(ctx.query.keywords, apis_.keywords[static_cast<std::size_t>(api_pos)]));
  return x;
}

std::vector<double> FeatureExtractor::extract_all(const Context& ctx) const {
  const std::size_t n_apis = apis_.size();
  const std::size_t d = static_cast<std::size_t>(dim());
  const std::size_t levels = k_grid_.size();
  std::vector<double> features(n_apis * d, 0.0);

  // CF features: walk each neighbor list once, snapshotting counts at every
  // grid checkpoint instead of recounting per api.
  std::vector<int> counts(n_apis);
  for (std::size_t channel = 0; channel < 2; ++channel) {
    const auto& order = channel == 0 ? ctx.text_order : ctx.key_order;
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t level = 0;
    for (std::size_t i = 0; i < order.size() && level < levels; ++i) {
      for (const auto& api_id :
           index_.entries[static_cast<std::size_t>(order[i])].used_apis) {
        auto it = apis_.id_to_pos.find(api_id);
        if (it != apis_.id_to_pos.end()) ++counts[static_cast<std::size_t>(it->second)];
      }
      while (level < levels && static_cast<std::size_t>(k_grid_[level]) == i + 1) {
        const double k = static_cast<double>(k_grid_[level]);
        const std::size_t col = channel * levels + level;
        for (std::size_t a = 0; a < n_apis; ++a) {
          features[a * d + col] = static_cast<double>(counts[a]) / k;
        }
        ++level;
      }
    }
  }

  for (std::size_t a = 0; a < n_apis; ++a) {
    features[a * d + 2 * levels] = cosine(ctx.query.text_vec, apis_.text_vecs[a]);
    features[a * d + 2 * levels + 1] = keyword_similarity(ctx.query.keywords, apis_.keywords[a]);
  }
  return features;
}

std::vector<double> extract_features(const ProjectQuery& query, const std::string& api_id,
                                     const NeighborIndex& index, const ApiCatalog& apis,
                                     const std::vector<int>& k_grid) {
  const FeatureExtractor extractor(index, apis, k_grid);
  const auto ctx = extractor.make_context(query);
  auto it = apis.id_to_pos.find(api_id);
  if (it == apis.id_to_pos.end())
    throw std::invalid_argument("extract_features: unknown api id " + api_id);
  return extractor.extract(ctx, it->second);
}

std::vector<std::string> feature_names(const std::vector<int>& k_grid) {
  std::vector<std::string> names;
  for (const int k : k_grid) names.push_back("cf_text_k" + std::to_string(k));
  for (const int k : k_grid) names.push_back("cf_key_k" + std::to_string(k));
  names.push_back("sim_text");
  names.push_back("sim_key");
  return names;
}

}  // namespace apirank
