#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "apirank/eval.hpp"
#include "support/synth.hpp"

using namespace apirank;
using apirank::testsupport::identical_groups_corpus;
using apirank::testsupport::planted_corpus;

namespace {

RankedList ranked_of(const std::vector<std::string>& ids) {
  RankedList out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.push_back({ids[i], static_cast<double>(ids.size() - i)});
  }
  return out;
}

using Truth = std::unordered_set<std::string>;

}  // namespace

TEST_CASE("hit_at_n positions") {
  const RankedList ranked = ranked_of({"a", "b", "c", "d", "e", "f", "g"});
  CHECK(hit_at_n(ranked, Truth{"d"}, 5) == 1);  // rank 4
  CHECK(hit_at_n(ranked, Truth{"f"}, 5) == 0);  // rank 6
  CHECK(hit_at_n(ranked, Truth{}, 5) == 0);
  CHECK(hit_at_n(ranked, Truth{"g"}, 100) == 1);
  CHECK_THROWS_AS(hit_at_n(ranked, Truth{"a"}, 0), std::invalid_argument);
}

TEST_CASE("average_precision fixtures") {
  const RankedList ranked = ranked_of({"a", "b", "c", "d"});
  CHECK(average_precision(ranked, Truth{"a"}) == 1.0);
  CHECK(average_precision(ranked, Truth{"b"}) == 0.5);
  // truth at ranks 1 and 3 -> (1 + 2/3) / 2 = 5/6
  CHECK(average_precision(ranked, Truth{"a", "c"}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(average_precision(ranked, Truth{"a", "c"}) == doctest::Approx(0.8333333333).epsilon(1e-9));
  // cutoff excludes the item at rank 3
  CHECK(average_precision(ranked, Truth{"c"}, 2) == 0.0);
  CHECK(average_precision(ranked, Truth{}, std::nullopt) == 0.0);
}

TEST_CASE("reciprocal_rank fixtures") {
  const RankedList ranked = ranked_of({"a", "b", "c"});
  CHECK(reciprocal_rank(ranked, Truth{"a"}) == 1.0);
  CHECK(reciprocal_rank(ranked, Truth{"b"}) == 0.5);
  CHECK(reciprocal_rank(ranked, Truth{"zz"}) == 0.0);
}

namespace {

// independent brute-force metrics over id vectors
double oracle_ap(const std::vector<std::string>& ids, const Truth& truth, int cutoff) {
  const int m = cutoff > 0 ? std::min<int>(cutoff, static_cast<int>(ids.size()))
                           : static_cast<int>(ids.size());
  double numerator = 0.0;
  int relevant = 0;
  for (int i = 1; i <= m; ++i) {
    const bool rel = truth.contains(ids[static_cast<std::size_t>(i - 1)]);
    if (!rel) continue;
    ++relevant;
    int correct_at_i = 0;
    for (int j = 1; j <= i; ++j) {
      if (truth.contains(ids[static_cast<std::size_t>(j - 1)])) ++correct_at_i;
    }
    numerator += static_cast<double>(correct_at_i) / i;
  }
  return relevant == 0 ? 0.0 : numerator / relevant;
}

int oracle_hit(const std::vector<std::string>& ids, const Truth& truth, int n) {
  for (int i = 0; i < std::min<int>(n, static_cast<int>(ids.size())); ++i) {
    if (truth.contains(ids[static_cast<std::size_t>(i)])) return 1;
  }
  return 0;
}

double oracle_rr(const std::vector<std::string>& ids, const Truth& truth) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (truth.contains(ids[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

}  // namespace

TEST_CASE("property: metrics agree with the brute-force oracle on random lists") {
  SplitMix64 rng(331);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(40));
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
    SplitMix64 shuffler(rng.next());
    seeded_shuffle(ids, shuffler);
    Truth truth;
    for (const auto& id : ids) {
      if (rng.below(4) == 0) truth.insert(id);
    }
    const RankedList ranked = ranked_of(ids);

    for (const int n_at : {1, 3, 5, 10}) {
      CHECK(hit_at_n(ranked, truth, n_at) == oracle_hit(ids, truth, n_at));
      CHECK(std::abs(average_precision(ranked, truth, n_at) - oracle_ap(ids, truth, n_at)) <
            1e-12);
    }
    CHECK(std::abs(average_precision(ranked, truth) - oracle_ap(ids, truth, 0)) < 1e-12);
    CHECK(std::abs(reciprocal_rank(ranked, truth) - oracle_rr(ids, truth)) < 1e-12);

    // hit@N is non-decreasing in N
    int previous = 0;
    for (int n_at = 1; n_at <= n; ++n_at) {
      const int hit = hit_at_n(ranked, truth, n_at);
      CHECK(hit >= previous);
      previous = hit;
    }
    // hit@1 is 1 exactly when the reciprocal rank is 1
    CHECK((hit_at_n(ranked, truth, 1) == 1) == (reciprocal_rank(ranked, truth) == 1.0));
  }
}

TEST_CASE("ap is 1 iff the relevant items fill the top of the list") {
  const RankedList ranked = ranked_of({"a", "b", "c", "d"});
  CHECK(average_precision(ranked, Truth{"a", "b"}) == 1.0);
  CHECK(average_precision(ranked, Truth{"a", "c"}) < 1.0);
}

TEST_CASE("fold plan partitions the projects") {
  const FoldPlan plan = make_fold_plan(47, 10, 42);
  REQUIRE(plan.folds.size() == 10);
  std::vector<int> seen;
  std::size_t min_size = 1000, max_size = 0;
  for (const auto& fold : plan.folds) {
    min_size = std::min(min_size, fold.size());
    max_size = std::max(max_size, fold.size());
    seen.insert(seen.end(), fold.begin(), fold.end());
  }
  CHECK(max_size - min_size <= 1);
  std::sort(seen.begin(), seen.end());
  std::vector<int> expected(47);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(seen == expected);

  // deterministic given the seed
  const FoldPlan again = make_fold_plan(47, 10, 42);
  CHECK(again.folds == plan.folds);
  const FoldPlan other = make_fold_plan(47, 10, 43);
  CHECK(other.folds != plan.folds);

  CHECK_THROWS_AS(make_fold_plan(5, 10, 1), std::invalid_argument);
}

namespace {

ApiCatalog catalog_of(const Corpus& corpus) {
  ApiCatalog apis;
  for (const auto& api : corpus.apis) {
    apis.ids.push_back(api.id);
    apis.text_vecs.push_back({});
    apis.keywords.push_back(api.keywords);
  }
  apis.finalize();
  return apis;
}

}  // namespace

TEST_CASE("poprec ranks by training usage counts") {
  Corpus corpus;
  for (const char* id : {"a", "b", "c"}) {
    ApiProfile api;
    api.id = id;
    corpus.apis.push_back(std::move(api));
  }
  const auto add_project = [&](const std::string& id, std::vector<std::string> used) {
    ProjectProfile project;
    project.id = id;
    project.used_apis = std::move(used);
    corpus.projects.push_back(std::move(project));
  };
  add_project("p0", {"a"});
  add_project("p1", {"a", "b"});
  add_project("p2", {"a"});
  corpus.reindex();

  const ApiCatalog apis = catalog_of(corpus);
  const RankedList ranked = baseline_poprec(corpus, {0, 1, 2}, apis, 7);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].api_id == "a");  // 3 uses
  CHECK(ranked[1].api_id == "b");  // 1 use
  CHECK(ranked[2].api_id == "c");  // 0 uses
  CHECK(ranked[0].score == 3.0);

  // equal counts: the seeded tie permutation decides
  const RankedList tied = baseline_poprec(corpus, {}, apis, 7);
  const std::vector<int> tie = api_tie_permutation(7, 3);
  std::vector<int> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return tie[static_cast<std::size_t>(x)] < tie[static_cast<std::size_t>(y)];
  });
  for (int i = 0; i < 3; ++i) {
    CHECK(tied[static_cast<std::size_t>(i)].api_id ==
          apis.ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  }
}

TEST_CASE("poprec matches a counting oracle on a random corpus") {
  const Corpus corpus = planted_corpus(5, {.clusters = 3,
                                           .projects_per_cluster = 15,
                                           .apis_per_cluster = 6});
  const ApiCatalog apis = catalog_of(corpus);
  std::vector<int> train(corpus.projects.size());
  std::iota(train.begin(), train.end(), 0);

  const RankedList ranked = baseline_poprec(corpus, train, apis, 11);

  std::unordered_map<std::string, int> counts;
  for (const auto& project : corpus.projects) {
    for (const auto& id : project.used_apis) ++counts[id];
  }
  for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
    CHECK(counts[ranked[i].api_id] >= counts[ranked[i + 1].api_id]);
    CHECK(ranked[i].score == counts[ranked[i].api_id]);
  }
}

TEST_CASE("exemplar equals ranking with all weight on sim_text, shared tie seed") {
  const Corpus corpus = planted_corpus(9, {.clusters = 3,
                                           .projects_per_cluster = 12,
                                           .apis_per_cluster = 6});
  RunConfig run;
  run.k_grid = {3, 5};
  run.seed = 17;
  const CorpusDocs docs = build_docs(corpus, run);

  const FoldPlan plan = make_fold_plan(static_cast<int>(corpus.projects.size()), 6, run.seed);
  std::vector<int> train;
  for (std::size_t f = 1; f < plan.folds.size(); ++f) {
    train.insert(train.end(), plan.folds[f].begin(), plan.folds[f].end());
  }
  const FoldAssets assets = fit_fold(corpus, docs, train, run);

  RankingModel model;
  model.vocab = assets.vocab;
  model.index = assets.index;
  model.apis = assets.apis;
  model.config.k_grid = run.k_grid;
  model.config.seed = run.seed;
  model.theta.assign(2 * run.k_grid.size() + 2, 0.0);
  model.theta[model.theta.size() - 2] = 1.0;  // sim_text only

  for (const int p : plan.folds[0]) {
    ProjectQuery query;
    query.text_vec = tfidf_vector(docs.project_bags[static_cast<std::size_t>(p)], assets.vocab);
    query.keywords = corpus.projects[static_cast<std::size_t>(p)].keywords;

    const RankedList via_model = rank_apis(model, query);
    const RankedList via_baseline = baseline_exemplar(query, assets.apis, run.seed);
    REQUIRE(via_model.size() == via_baseline.size());
    for (std::size_t i = 0; i < via_model.size(); ++i) {
      CHECK(via_model[i].api_id == via_baseline[i].api_id);
      CHECK(via_model[i].score == via_baseline[i].score);
    }
  }
}

TEST_CASE("exemplar with all-zero similarities is the seeded permutation") {
  ApiCatalog apis;
  for (int a = 0; a < 6; ++a) {
    apis.ids.push_back("api" + std::to_string(a));
    apis.text_vecs.push_back({});
    apis.keywords.push_back({});
  }
  apis.finalize();
  ProjectQuery query;  // zero-norm text
  const RankedList ranked = baseline_exemplar(query, apis, 23);
  const std::vector<int> tie = api_tie_permutation(23, 6);
  std::vector<int> order = {0, 1, 2, 3, 4, 5};
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return tie[static_cast<std::size_t>(x)] < tie[static_cast<std::size_t>(y)];
  });
  for (int i = 0; i < 6; ++i) {
    CHECK(ranked[static_cast<std::size_t>(i)].api_id ==
          apis.ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    CHECK(ranked[static_cast<std::size_t>(i)].score == 0.0);
  }
}

TEST_CASE("run_cv on textually identical groups reaches hit@5 = 1") {
  const Corpus corpus = identical_groups_corpus(3, 12, 3);
  EvalConfig config;
  config.run.seed = 42;
  config.run.folds = 10;
  const EvalReport report = run_cv(corpus, config);
  CHECK(report.aggregate.hit_at.at(5) == 1.0);
  CHECK(report.aggregate.mrr > 0.9);
  REQUIRE(report.folds.size() == 10);

  // aggregate is the arithmetic mean of the folds
  double mean_map = 0.0;
  for (const auto& fold : report.folds) mean_map += fold.model.map / 10.0;
  CHECK(report.aggregate.map == doctest::Approx(mean_map).epsilon(1e-12));
}

TEST_CASE("run_cv is deterministic for a fixed seed") {
  const Corpus corpus = planted_corpus(13, {.clusters = 3,
                                            .projects_per_cluster = 12,
                                            .apis_per_cluster = 6});
  EvalConfig config;
  config.run.seed = 5;
  config.run.folds = 6;
  config.run.k_grid = {3, 5, 8};
  config.baselines = true;
  const EvalReport a = run_cv(corpus, config);
  const EvalReport b = run_cv(corpus, config);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_csv(a) == report_to_csv(b));
  CHECK(report_to_text(a) == report_to_text(b));
}

TEST_CASE("run_cv requires enough projects") {
  const Corpus corpus = identical_groups_corpus(2, 3, 2);  // 6 projects
  EvalConfig config;
  config.run.folds = 10;
  CHECK_THROWS_AS(run_cv(corpus, config), std::invalid_argument);
}

TEST_CASE("sweep subsets are nested and fraction 1.0 reproduces the full-pool fold") {
  const Corpus corpus = planted_corpus(21, {.clusters = 3,
                                            .projects_per_cluster = 14,
                                            .apis_per_cluster = 6});
  EvalConfig config;
  config.run.seed = 31;
  config.run.folds = 6;
  config.run.k_grid = {3, 5, 10};

  const auto rows = training_size_sweep(corpus, {0.3, 0.6, 1.0}, config);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n_train <= rows[1].n_train);
  CHECK(rows[1].n_train <= rows[2].n_train);

  // fraction 1.0 trains on the whole pool: identical to run_cv's fold 0
  const EvalReport cv = run_cv(corpus, config);
  const MetricSuite& fold0 = cv.folds.front().model;
  const MetricSuite& full = rows[2].metrics;
  CHECK(full.map == fold0.map);
  CHECK(full.mrr == fold0.mrr);
  for (const auto& [n, value] : fold0.hit_at) CHECK(full.hit_at.at(n) == value);
  for (const auto& [n, value] : fold0.map_at) CHECK(full.map_at.at(n) == value);
}

TEST_CASE("sweep validates fractions") {
  const Corpus corpus = identical_groups_corpus(3, 10, 3);
  EvalConfig config;
  config.run.folds = 6;
  CHECK_THROWS_AS(training_size_sweep(corpus, {0.0}, config), std::invalid_argument);
  CHECK_THROWS_AS(training_size_sweep(corpus, {1.5}, config), std::invalid_argument);
}
