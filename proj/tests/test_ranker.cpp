#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "apirank/ranker.hpp"
#include "apirank/rng.hpp"

using namespace apirank;

namespace {

TrainingSet make_set(int dim, const std::vector<std::vector<double>>& row_data,
                     const std::vector<std::pair<int, int>>& triples) {
  TrainingSet set;
  set.dim = dim;
  for (std::size_t r = 0; r < row_data.size(); ++r) {
    set.rows.insert(set.rows.end(), row_data[r].begin(), row_data[r].end());
    set.row_info.push_back({0, static_cast<std::int32_t>(r), false});
  }
  for (const auto& [pos, neg] : triples) {
    set.triples.push_back({static_cast<std::int32_t>(pos), static_cast<std::int32_t>(neg)});
  }
  set.project_ids = {"p"};
  return set;
}

TrainingSet random_set(SplitMix64& rng, int dim, int n_rows, int n_triples) {
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < n_rows; ++r) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (auto& value : x) value = static_cast<double>(rng.below(1000)) / 999.0;
    rows.push_back(std::move(x));
  }
  std::vector<std::pair<int, int>> triples;
  for (int t = 0; t < n_triples; ++t) {
    const int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_rows)));
    int neg = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_rows)));
    if (neg == pos) neg = (neg + 1) % n_rows;
    triples.emplace_back(pos, neg);
  }
  return make_set(dim, rows, triples);
}

std::vector<double> random_theta(SplitMix64& rng, int dim, double scale = 1.0) {
  std::vector<double> theta(static_cast<std::size_t>(dim));
  for (auto& value : theta) {
    value = (static_cast<double>(rng.below(2000)) / 1000.0 - 1.0) * scale;
  }
  return theta;
}

// independent straight-line objective
double oracle_loss(const std::vector<double>& theta, const TrainingSet& set, double lambda) {
  double hinge = 0.0;
  for (const auto& triple : set.triples) {
    double f_pos = 0.0, f_neg = 0.0;
    for (int j = 0; j < set.dim; ++j) {
      f_pos += theta[static_cast<std::size_t>(j)] *
               set.rows[static_cast<std::size_t>(triple.pos) * static_cast<std::size_t>(set.dim) +
                        static_cast<std::size_t>(j)];
      f_neg += theta[static_cast<std::size_t>(j)] *
               set.rows[static_cast<std::size_t>(triple.neg) * static_cast<std::size_t>(set.dim) +
                        static_cast<std::size_t>(j)];
    }
    const double m = 1.0 - (f_pos - f_neg);
    if (m > 0.0) hinge += m * m;
  }
  double reg = 0.0;
  for (const double t : theta) reg += t * t;
  return hinge / static_cast<double>(set.triples.size()) + 0.5 * lambda * reg;
}

}  // namespace

TEST_CASE("score is the dot product and rejects mismatched dimensions") {
  const std::vector<double> zero(4, 0.0);
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
  CHECK(score(zero, x) == 0.0);

  std::vector<double> basis(4, 0.0);
  basis[2] = 1.0;
  const std::vector<double> probe = {0.0, 0.0, 0.5, 0.9};
  CHECK(score(basis, probe) == 0.5);

  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto theta = random_theta(rng, 7);
    const auto v = random_theta(rng, 7);
    double expected = 0.0;
    for (int j = 0; j < 7; ++j)
      expected += theta[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
    CHECK(score(theta, v) == doctest::Approx(expected).epsilon(1e-15));
  }

  const std::vector<double> short_x = {1.0};
  CHECK_THROWS_AS(score(zero, short_x), std::invalid_argument);
}

TEST_CASE("loss at theta=0 is exactly 1") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const TrainingSet set = random_set(rng, 6, 12, 1 + static_cast<int>(rng.below(60)));
    const std::vector<double> zero(6, 0.0);
    const LossGrad lg = loss_and_gradient(zero, set, 1.0);
    CHECK(lg.value == 1.0);  // exact: every margin is exactly 1
  }
}

TEST_CASE("separated triples with margins >= 1 leave only the regularizer") {
  const TrainingSet set = make_set(1, {{2.0}, {0.0}}, {{0, 1}});
  const std::vector<double> theta = {0.6};  // margin = 1 - 1.2 < 0, inactive
  const double lambda = 0.8;
  const LossGrad lg = loss_and_gradient(theta, set, lambda);
  CHECK(lg.value == 0.5 * lambda * 0.36);
  CHECK(lg.grad[0] == lambda * 0.6);  // only the regularizer contributes
}

TEST_CASE("analytic gradient matches central finite differences of an independent loss") {
  SplitMix64 rng(7);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + static_cast<int>(rng.below(8));
    const TrainingSet set = random_set(rng, dim, 10 + static_cast<int>(rng.below(20)), 80);
    const double lambda = 0.25 + static_cast<double>(rng.below(200)) / 100.0;
    const auto theta = random_theta(rng, dim);

    const LossGrad lg = loss_and_gradient(theta, set, lambda);
    CHECK(lg.value == doctest::Approx(oracle_loss(theta, set, lambda)).epsilon(1e-12));

    for (int j = 0; j < dim; ++j) {
      auto plus = theta, minus = theta;
      plus[static_cast<std::size_t>(j)] += h;
      minus[static_cast<std::size_t>(j)] -= h;
      const double fd = (oracle_loss(plus, set, lambda) - oracle_loss(minus, set, lambda)) / (2 * h);
      const double scale =
          std::max({1.0, std::abs(fd), std::abs(lg.grad[static_cast<std::size_t>(j)])});
      CHECK(std::abs(lg.grad[static_cast<std::size_t>(j)] - fd) / scale < 1e-5);
    }
  }
}

TEST_CASE("hessian_vector_product edge cases") {
  SplitMix64 rng(11);
  const TrainingSet set = random_set(rng, 5, 10, 40);

  const std::vector<double> zero_v(5, 0.0);
  const auto theta = random_theta(rng, 5);
  CHECK(hessian_vector_product(theta, set, 1.5, zero_v) == std::vector<double>(5, 0.0));

  // wide margins: no active triples, only the regularizer remains
  const TrainingSet separated = make_set(1, {{5.0}, {0.0}}, {{0, 1}});
  const std::vector<double> big = {3.0};
  const std::vector<double> v = {2.0};
  const auto hv = hessian_vector_product(big, separated, 0.7, v);
  CHECK(hv[0] == doctest::Approx(0.7 * 2.0).epsilon(1e-15));
}

TEST_CASE("hessian_vector_product matches a dense materialized hessian") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + static_cast<int>(rng.below(9));  // <= 10 features
    const TrainingSet set = random_set(rng, dim, 8 + static_cast<int>(rng.below(10)), 100);
    const double lambda = 0.5 + static_cast<double>(rng.below(100)) / 100.0;
    const auto theta = random_theta(rng, dim);
    const auto v = random_theta(rng, dim);

    // dense oracle: H = (2/|D|) sum_active dx dx^T + lambda I
    std::vector<double> H(static_cast<std::size_t>(dim * dim), 0.0);
    const double inv_n = 1.0 / static_cast<double>(set.triples.size());
    for (const auto& triple : set.triples) {
      std::vector<double> dx(static_cast<std::size_t>(dim));
      double f_diff = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double xp =
            set.rows[static_cast<std::size_t>(triple.pos) * static_cast<std::size_t>(dim) +
                     static_cast<std::size_t>(j)];
        const double xn =
            set.rows[static_cast<std::size_t>(triple.neg) * static_cast<std::size_t>(dim) +
                     static_cast<std::size_t>(j)];
        dx[static_cast<std::size_t>(j)] = xp - xn;
        f_diff += theta[static_cast<std::size_t>(j)] * dx[static_cast<std::size_t>(j)];
      }
      if (1.0 - f_diff <= 0.0) continue;
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          H[static_cast<std::size_t>(a * dim + b)] +=
              2.0 * inv_n * dx[static_cast<std::size_t>(a)] * dx[static_cast<std::size_t>(b)];
        }
      }
    }
    for (int a = 0; a < dim; ++a) H[static_cast<std::size_t>(a * dim + a)] += lambda;

    std::vector<double> expected(static_cast<std::size_t>(dim), 0.0);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        expected[static_cast<std::size_t>(a)] +=
            H[static_cast<std::size_t>(a * dim + b)] * v[static_cast<std::size_t>(b)];
      }
    }

    const auto hv = hessian_vector_product(theta, set, lambda, v);
    for (int a = 0; a < dim; ++a) {
      CHECK(std::abs(hv[static_cast<std::size_t>(a)] - expected[static_cast<std::size_t>(a)]) <
            1e-8);
    }
  }
}

TEST_CASE("train solves a separable 1-d problem with zero ordering errors") {
  const TrainingSet set = make_set(1, {{1.0}, {0.0}, {0.9}, {0.1}}, {{0, 1}, {2, 3}});
  const TrainResult result = train(set, 1.0);
  CHECK(result.converged);
  CHECK(result.theta[0] > 0.0);
  for (const auto& triple : set.triples) {
    const double f_pos = result.theta[0] * set.rows[static_cast<std::size_t>(triple.pos)];
    const double f_neg = result.theta[0] * set.rows[static_cast<std::size_t>(triple.neg)];
    CHECK(f_pos > f_neg);
  }
}

TEST_CASE("training is deterministic: identical runs produce bit-identical theta") {
  SplitMix64 rng(17);
  const TrainingSet set = random_set(rng, 12, 40, 400);
  const TrainResult a = train(set, 1.0);
  const TrainResult b = train(set, 1.0);
  REQUIRE(a.theta.size() == b.theta.size());
  CHECK(std::memcmp(a.theta.data(), b.theta.data(), a.theta.size() * sizeof(double)) == 0);
  CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("strict convexity: two initializations reach the same optimum") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const TrainingSet set = random_set(rng, 8, 30, 250);
    TrainOptions options;
    options.grad_tol = 1e-7;
    options.theta0 = random_theta(rng, 8, 2.0);
    const TrainResult a = train(set, 1.0, options);
    options.theta0 = random_theta(rng, 8, 2.0);
    const TrainResult b = train(set, 1.0, options);
    for (int j = 0; j < 8; ++j) {
      CHECK(std::abs(a.theta[static_cast<std::size_t>(j)] - b.theta[static_cast<std::size_t>(j)]) <
            1e-4);
    }
  }
}

TEST_CASE("objective trace is monotone non-increasing") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const TrainingSet set = random_set(rng, 6, 20, 150);
    TrainOptions options;
    options.theta0 = random_theta(rng, 6, 3.0);
    const TrainResult result = train(set, 0.5, options);
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      CHECK(result.objective_trace[i] <= result.objective_trace[i - 1]);
    }
  }
}

TEST_CASE("truncated newton and a slow gradient-descent oracle agree on the optimum") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 3; ++trial) {
    const int dim = 5;
    const TrainingSet set = random_set(rng, dim, 15, 60);
    const double lambda = 1.0;

    TrainOptions options;
    options.grad_tol = 1e-9;
    const TrainResult newton = train(set, lambda, options);

    // oracle: plain gradient descent over the independent loss
    std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
    const double h = 1e-7;
    const double step = 0.05;
    for (int iter = 0; iter < 200000; ++iter) {
      std::vector<double> grad(static_cast<std::size_t>(dim));
      double norm = 0.0;
      for (int j = 0; j < dim; ++j) {
        auto plus = theta, minus = theta;
        plus[static_cast<std::size_t>(j)] += h;
        minus[static_cast<std::size_t>(j)] -= h;
        grad[static_cast<std::size_t>(j)] =
            (oracle_loss(plus, set, lambda) - oracle_loss(minus, set, lambda)) / (2 * h);
        norm = std::max(norm, std::abs(grad[static_cast<std::size_t>(j)]));
      }
      if (norm < 1e-8) break;
      for (int j = 0; j < dim; ++j)
        theta[static_cast<std::size_t>(j)] -= step * grad[static_cast<std::size_t>(j)];
    }

    const double r_newton = oracle_loss(newton.theta, set, lambda);
    const double r_gd = oracle_loss(theta, set, lambda);
    CHECK(std::abs(r_newton - r_gd) < 1e-6);
    CHECK(r_newton <= r_gd + 1e-9);
  }
}

TEST_CASE("train validates inputs") {
  SplitMix64 rng(31);
  const TrainingSet set = random_set(rng, 4, 10, 20);
  CHECK_THROWS_AS(train(set, 0.0), TrainingError);
  CHECK_THROWS_AS(train(set, -1.0), TrainingError);
  TrainOptions options;
  options.theta0 = {1.0};  // wrong dimension
  CHECK_THROWS_AS(train(set, 1.0, options), TrainingError);
  const TrainingSet empty;
  CHECK_THROWS_AS(train(empty, 1.0), TrainingError);
}

namespace {

RankingModel tiny_model(std::uint64_t seed, int n_projects, int n_apis) {
  RankingModel model;
  model.config.seed = seed;
  model.config.k_grid = {2, 3};
  SplitMix64 rng(seed);
  for (int a = 0; a < n_apis; ++a) {
    model.apis.ids.push_back("api" + std::to_string(a));
    SparseVector v;
    for (int i = 0; i < 8; ++i) {
      if (rng.below(2) == 0)
        v.entries.emplace_back(i, static_cast<double>(rng.below(50) + 1) / 10.0);
    }
    model.apis.text_vecs.push_back(std::move(v));
    model.apis.keywords.push_back({"k" + std::to_string(rng.below(5))});
  }
  model.apis.finalize();
  for (int p = 0; p < n_projects; ++p) {
    NeighborIndex::Entry entry;
    entry.project_id = "proj" + std::to_string(p);
    SparseVector v;
    for (int i = 0; i < 8; ++i) {
      if (rng.below(2) == 0)
        v.entries.emplace_back(i, static_cast<double>(rng.below(50) + 1) / 10.0);
    }
    entry.text_vec = std::move(v);
    entry.keywords = {"k" + std::to_string(rng.below(5))};
    entry.used_apis.insert("api" + std::to_string(rng.below(static_cast<std::uint64_t>(n_apis))));
    model.index.entries.push_back(std::move(entry));
  }
  model.index.finalize(seed);
  model.theta.assign(2 * 2 + 2, 0.0);
  return model;
}

}  // namespace

TEST_CASE("rank_apis with theta=0 is the seeded tie permutation") {
  const RankingModel model = tiny_model(99, 10, 7);
  ProjectQuery query;
  const RankedList ranked = rank_apis(model, query);
  REQUIRE(ranked.size() == 7);

  const std::vector<int> tie = api_tie_permutation(model.config.seed, 7);
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return tie[static_cast<std::size_t>(a)] < tie[static_cast<std::size_t>(b)];
  });
  for (int i = 0; i < 7; ++i) {
    CHECK(ranked[static_cast<std::size_t>(i)].api_id ==
          model.apis.ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    CHECK(ranked[static_cast<std::size_t>(i)].score == 0.0);
  }
}

TEST_CASE("rank_apis with weight only on sim_text sorts by descending cosine") {
  RankingModel model = tiny_model(101, 12, 9);
  model.theta.assign(model.theta.size(), 0.0);
  model.theta[model.theta.size() - 2] = 1.0;  // sim_text position

  SplitMix64 rng(103);
  ProjectQuery query;
  for (int i = 0; i < 8; ++i) {
    if (rng.below(2) == 0)
      query.text_vec.entries.emplace_back(i, static_cast<double>(rng.below(50) + 1) / 10.0);
  }

  const RankedList ranked = rank_apis(model, query);
  for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
    CHECK(ranked[i].score >= ranked[i + 1].score);
  }
  for (const auto& [api_id, value] : ranked) {
    const int pos = model.apis.id_to_pos.at(api_id);
    CHECK(value == doctest::Approx(cosine(query.text_vec,
                                          model.apis.text_vecs[static_cast<std::size_t>(pos)]))
                       .epsilon(1e-15));
  }
}

TEST_CASE("rank_apis matches a score-then-sort oracle and ignores score shifts") {
  RankingModel model = tiny_model(107, 15, 11);
  SplitMix64 rng(109);
  for (auto& t : model.theta) t = static_cast<double>(rng.below(200)) / 100.0 - 1.0;

  ProjectQuery query;
  for (int i = 0; i < 8; ++i) {
    if (rng.below(2) == 0)
      query.text_vec.entries.emplace_back(i, static_cast<double>(rng.below(50) + 1) / 10.0);
  }
  query.keywords = {"k1"};

  const RankedList ranked = rank_apis(model, query);

  // oracle: recompute every score through the extractor, full sort
  const FeatureExtractor extractor(model.index, model.apis, model.config.k_grid);
  const auto ctx = extractor.make_context(query);
  std::vector<double> scores(model.apis.size());
  for (std::size_t a = 0; a < model.apis.size(); ++a) {
    const auto x = extractor.extract(ctx, static_cast<int>(a));
    double f = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) f += model.theta[j] * x[j];
    scores[a] = f;
  }
  const std::vector<int> tie = api_tie_permutation(model.config.seed, model.apis.size());
  std::vector<int> order(static_cast<int>(model.apis.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return tie[static_cast<std::size_t>(a)] < tie[static_cast<std::size_t>(b)];
  });
  REQUIRE(ranked.size() == order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(ranked[i].api_id == model.apis.ids[static_cast<std::size_t>(order[i])]);
  }

  // argsort invariance: shifting every score by a constant keeps the order
  std::vector<double> shifted = scores;
  for (auto& s : shifted) s += 17.25;
  const RankedList reranked = sort_scored_apis(model.apis.ids, std::move(shifted), tie);
  for (std::size_t i = 0; i < reranked.size(); ++i) {
    CHECK(reranked[i].api_id == ranked[i].api_id);
  }
}

namespace {

struct TripleWorld {
  NeighborIndex index;
  ApiCatalog apis;
  FeatureExtractor extractor{index, apis, {1, 2}};

  TripleWorld(int n_apis, std::uint64_t seed) {
    for (int a = 0; a < n_apis; ++a) {
      apis.ids.push_back("a" + std::to_string(a + 1));
      apis.text_vecs.push_back({});
      apis.keywords.push_back({});
    }
    apis.finalize();
    for (int p = 0; p < 3; ++p) {
      NeighborIndex::Entry entry;
      entry.project_id = "bg" + std::to_string(p);
      entry.used_apis.insert("a1");
      index.entries.push_back(std::move(entry));
    }
    index.finalize(seed);
  }

  TrainingProject project(const std::string& id, std::vector<std::string> used) {
    TrainingProject tp;
    tp.id = id;
    tp.context = extractor.make_context({});
    tp.used_apis = std::move(used);
    return tp;
  }
};

}  // namespace

TEST_CASE("build_triples enumerates every positive-negative pair in ALL mode") {
  TripleWorld world(3, 5);
  // A_p = {a1}, A = {a1, a2, a3} -> (a1,a2), (a1,a3)
  const TrainingSet set =
      build_triples({world.project("p", {"a1"})}, world.extractor, kAllNegatives, 7);
  REQUIRE(set.triples.size() == 2);
  REQUIRE(set.n_rows() == 3);  // one row per api
  for (const auto& triple : set.triples) {
    CHECK(set.row_info[static_cast<std::size_t>(triple.pos)].label);
    CHECK_FALSE(set.row_info[static_cast<std::size_t>(triple.neg)].label);
    CHECK(world.apis.ids[static_cast<std::size_t>(
              set.row_info[static_cast<std::size_t>(triple.pos)].api)] == "a1");
  }
  const auto neg_of = [&](std::size_t t) {
    return world.apis.ids[static_cast<std::size_t>(
        set.row_info[static_cast<std::size_t>(set.triples[t].neg)].api)];
  };
  CHECK(neg_of(0) == "a2");
  CHECK(neg_of(1) == "a3");
}

TEST_CASE("build_triples with rate 1 yields one triple per positive") {
  TripleWorld world(6, 5);
  const TrainingSet set = build_triples(
      {world.project("p1", {"a1", "a3"}), world.project("p2", {"a2"})}, world.extractor, 1, 7);
  CHECK(set.triples.size() == 3);  // |A_p| triples per project

  // sampling is deterministic per (seed, project id)
  const TrainingSet again = build_triples(
      {world.project("p1", {"a1", "a3"}), world.project("p2", {"a2"})}, world.extractor, 1, 7);
  REQUIRE(again.triples.size() == set.triples.size());
  for (std::size_t t = 0; t < set.triples.size(); ++t) {
    CHECK(again.row_info[static_cast<std::size_t>(again.triples[t].neg)].api ==
          set.row_info[static_cast<std::size_t>(set.triples[t].neg)].api);
  }
}

TEST_CASE("build_triples matches the combinatorial count oracle in ALL mode") {
  SplitMix64 rng(41);
  TripleWorld world(8, 5);
  std::vector<TrainingProject> projects;
  long long expected = 0;
  for (int p = 0; p < 12; ++p) {
    std::vector<std::string> used;
    const int n_used = 1 + static_cast<int>(rng.below(5));
    for (int u = 0; u < n_used; ++u) {
      used.push_back("a" + std::to_string(1 + rng.below(8)));
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    expected += static_cast<long long>(used.size()) * (8 - static_cast<long long>(used.size()));
    projects.push_back(world.project("p" + std::to_string(p), used));
  }
  const TrainingSet set = build_triples(projects, world.extractor, kAllNegatives, 7);
  CHECK(static_cast<long long>(set.triples.size()) == expected);
}

TEST_CASE("build_triples skips projects that use every api") {
  TripleWorld world(3, 5);
  const TrainingSet set = build_triples(
      {world.project("all", {"a1", "a2", "a3"}), world.project("ok", {"a2"})}, world.extractor,
      kAllNegatives, 7);
  CHECK(set.projects_skipped == 1);
  CHECK(set.project_ids == std::vector<std::string>{"ok"});
  CHECK(set.triples.size() == 2);
}

TEST_CASE("model files round trip") {
  RankingModel model = tiny_model(127, 8, 6);
  SplitMix64 rng(131);
  for (auto& t : model.theta) t = static_cast<double>(rng.below(2000)) / 500.0 - 2.0;
  model.lambda = 0.75;
  model.vocab.add_term("alpha", 2);
  model.vocab.add_term("beta", 1);
  model.vocab.set_n_docs(3);

  const std::filesystem::path path = std::filesystem::temp_directory_path() / "apirank_model.json";
  save_model(model, path);
  const RankingModel loaded = load_model(path);

  CHECK(loaded.theta == model.theta);
  CHECK(loaded.lambda == model.lambda);
  CHECK(loaded.config.k_grid == model.config.k_grid);
  CHECK(loaded.config.seed == model.config.seed);
  CHECK(loaded.vocab.n_docs() == 3);
  CHECK(loaded.vocab.term_index("alpha") == 0);
  CHECK(loaded.vocab.df(loaded.vocab.term_index("alpha")) == 2);
  CHECK(loaded.apis.ids == model.apis.ids);
  REQUIRE(loaded.index.entries.size() == model.index.entries.size());
  for (std::size_t i = 0; i < loaded.index.entries.size(); ++i) {
    CHECK(loaded.index.entries[i].project_id == model.index.entries[i].project_id);
    CHECK(loaded.index.entries[i].text_vec.entries == model.index.entries[i].text_vec.entries);
    CHECK(loaded.index.entries[i].used_apis == model.index.entries[i].used_apis);
  }
  CHECK(loaded.index.tie_rank == model.index.tie_rank);

  // a query ranks identically through the reloaded model
  ProjectQuery query;
  query.keywords = {"k1"};
  const RankedList a = rank_apis(model, query);
  const RankedList b = rank_apis(loaded, query);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].api_id == b[i].api_id);
    CHECK(a[i].score == b[i].score);
  }
  std::filesystem::remove(path);
}
