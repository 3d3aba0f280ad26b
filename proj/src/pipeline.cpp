#include "apirank/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "apirank/rng.hpp"

namespace apirank {

void RunConfig::validate() const {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (k_grid.empty()) throw std::invalid_argument("k-grid must not be empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] <= 0) throw std::invalid_argument("k-grid values must be positive");
    if (i > 0 && k_grid[i] <= k_grid[i - 1])
      throw std::invalid_argument("k-grid must be strictly increasing");
  }
  if (negative_rate.has_value() && *negative_rate <= 0)
    throw std::invalid_argument("negative rate must be positive");
  if (triple_budget <= 0) throw std::invalid_argument("triple budget must be positive");
  if (top_n <= 0) throw std::invalid_argument("top-n must be positive");
  if (folds <= 1) throw std::invalid_argument("fold count must be at least 2");
  if (noun_filter != "heuristic" && noun_filter != "passthrough")
    throw std::invalid_argument("unknown noun filter: " + noun_filter);
}

CorpusDocs build_docs(const Corpus& corpus, const RunConfig& config) {
  const auto filter = make_noun_filter(config.noun_filter);
  const StopList stoplist = config.stoplist_path.empty()
                                ? StopList::smart_english()
                                : StopList::from_file(config.stoplist_path);

  CorpusDocs docs;
  docs.api_bags.reserve(corpus.apis.size());
  for (const auto& api : corpus.apis) {
    docs.api_bags.push_back(build_document(api.description_text(), api.keywords, *filter, stoplist));
  }
  docs.project_bags.reserve(corpus.projects.size());
  for (const auto& project : corpus.projects) {
    std::string text = project.description_text();
    if (config.include_project_name && !project.name.empty()) {
      text = project.name + ' ' + text;
    }
    docs.project_bags.push_back(build_document(text, project.keywords, *filter, stoplist));
  }
  return docs;
}

FoldAssets fit_fold(const Corpus& corpus, const CorpusDocs& docs,
                    std::vector<int> train_projects, const RunConfig& config) {
  std::sort(train_projects.begin(), train_projects.end());

  FoldAssets assets;
  assets.train_projects = std::move(train_projects);

  // Shared vocabulary over api documents plus training project documents.
  std::vector<const TokenBag*> fit_docs;
  fit_docs.reserve(docs.api_bags.size() + assets.train_projects.size());
  for (const auto& bag : docs.api_bags) fit_docs.push_back(&bag);
  for (const int p : assets.train_projects)
    fit_docs.push_back(&docs.project_bags[static_cast<std::size_t>(p)]);
  assets.vocab = fit_vocabulary(fit_docs);

  assets.apis.ids.reserve(corpus.apis.size());
  for (std::size_t a = 0; a < corpus.apis.size(); ++a) {
    assets.apis.ids.push_back(corpus.apis[a].id);
    assets.apis.text_vecs.push_back(tfidf_vector(docs.api_bags[a], assets.vocab));
    assets.apis.keywords.push_back(corpus.apis[a].keywords);
  }
  assets.apis.finalize();

  assets.train_vecs.reserve(assets.train_projects.size());
  for (const int p : assets.train_projects) {
    const auto& project = corpus.projects[static_cast<std::size_t>(p)];
    NeighborIndex::Entry entry;
    entry.project_id = project.id;
    entry.text_vec = tfidf_vector(docs.project_bags[static_cast<std::size_t>(p)], assets.vocab);
    entry.keywords = project.keywords;
    entry.used_apis.insert(project.used_apis.begin(), project.used_apis.end());
    assets.train_vecs.push_back(entry.text_vec);
    assets.index.entries.push_back(std::move(entry));
  }
  assets.index.finalize(config.seed);
  return assets;
}

NegativeRate resolve_negative_rate(const Corpus& corpus, const std::vector<int>& train_projects,
                                   const RunConfig& config) {
  if (!config.negative_rate_is_auto) return config.negative_rate;
  long long full = 0;
  const long long n_apis = static_cast<long long>(corpus.apis.size());
  for (const int p : train_projects) {
    const long long used =
        static_cast<long long>(corpus.projects[static_cast<std::size_t>(p)].used_apis.size());
    full += used * (n_apis - used);
  }
  if (full > config.triple_budget) return 10;
  return kAllNegatives;
}

std::vector<TrainingProject> make_training_projects(const Corpus& corpus,
                                                    const FoldAssets& assets,
                                                    const FeatureExtractor& extractor) {
  std::vector<TrainingProject> out;
  out.reserve(assets.train_projects.size());
  for (std::size_t i = 0; i < assets.train_projects.size(); ++i) {
    const auto& project =
        corpus.projects[static_cast<std::size_t>(assets.train_projects[i])];
    ProjectQuery query;
    query.text_vec = assets.train_vecs[i];
    query.keywords = project.keywords;
    query.exclude_id = project.id;  // a training project never matches itself
    TrainingProject tp;
    tp.id = project.id;
    tp.context = extractor.make_context(std::move(query));
    tp.used_apis = project.used_apis;
    out.push_back(std::move(tp));
  }
  return out;
}

TrainOutcome train_pipeline(const Corpus& corpus, const RunConfig& config,
                            const TrainOptions& options, TrainingSet* captured_set) {
  config.validate();
  if (corpus.projects.empty()) throw std::invalid_argument("corpus has no projects");
  if (corpus.apis.size() < 2) throw std::invalid_argument("corpus needs at least 2 apis");

  const CorpusDocs docs = build_docs(corpus, config);
  std::vector<int> all(corpus.projects.size());
  std::iota(all.begin(), all.end(), 0);
  FoldAssets assets = fit_fold(corpus, docs, std::move(all), config);

  const FeatureExtractor extractor(assets.index, assets.apis, config.k_grid);
  const NegativeRate rate = resolve_negative_rate(corpus, assets.train_projects, config);
  TrainingSet set = build_triples(make_training_projects(corpus, assets, extractor), extractor,
                                  rate, config.seed);
  if (set.triples.empty()) {
    throw TrainingError("no training triples; every project uses every api?");
  }

  TrainOutcome outcome;
  outcome.n_triples = set.triples.size();
  outcome.projects_skipped = set.projects_skipped;
  outcome.optimization = train(set, config.lambda, options);
  if (captured_set) *captured_set = std::move(set);

  outcome.model.theta = outcome.optimization.theta;
  outcome.model.lambda = config.lambda;
  outcome.model.vocab = std::move(assets.vocab);
  outcome.model.index = std::move(assets.index);
  outcome.model.apis = std::move(assets.apis);
  outcome.model.config.k_grid = config.k_grid;
  outcome.model.config.seed = config.seed;
  outcome.model.config.noun_filter = config.noun_filter;
  outcome.model.config.include_project_name = config.include_project_name;
  return outcome;
}

ProjectQuery make_query(const RankingModel& model, std::string_view description,
                        const std::vector<std::string>& keywords) {
  const auto filter = make_noun_filter(model.config.noun_filter);
  const TokenBag bag =
      build_document(description, canonical_keywords(keywords), *filter);
  ProjectQuery query;
  query.text_vec = tfidf_vector(bag, model.vocab);
  query.keywords = canonical_keywords(keywords);
  return query;
}

RankedList recommend(const RankingModel& model, std::string_view description,
                     const std::vector<std::string>& keywords, int top_n) {
  RankedList ranked = rank_apis(model, make_query(model, description, keywords));
  if (top_n > 0 && static_cast<std::size_t>(top_n) < ranked.size()) {
    ranked.resize(static_cast<std::size_t>(top_n));
  }
  return ranked;
}

void dump_feature_matrix(const TrainingSet& set, const ApiCatalog& apis,
                         const std::vector<int>& k_grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature matrix: " + path.string());
  out << "project_id,api_id";
  for (const auto& name : feature_names(k_grid)) out << ',' << name;
  out << ",label\n";
  out.precision(17);
  const std::size_t d = static_cast<std::size_t>(set.dim);
  for (std::size_t r = 0; r < set.n_rows(); ++r) {
    const auto& info = set.row_info[r];
    out << set.project_ids[static_cast<std::size_t>(info.project)] << ','
        << apis.ids[static_cast<std::size_t>(info.api)];
    for (std::size_t j = 0; j < d; ++j) out << ',' << set.rows[r * d + j];
    out << ',' << (info.label ? 1 : 0) << '\n';
  }
}

}  // namespace apirank
