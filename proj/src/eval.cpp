#include "apirank/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "apirank/rng.hpp"

namespace apirank {

int hit_at_n(const RankedList& ranked, const std::unordered_set<std::string>& truth, int n) {
  if (n < 1) throw std::invalid_argument("hit_at_n: n must be positive");
  const std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < limit; ++i) {
    if (truth.contains(ranked[i].api_id)) return 1;
  }
  return 0;
}

double average_precision(const RankedList& ranked, const std::unordered_set<std::string>& truth,
                         std::optional<int> cutoff) {
  std::size_t limit = ranked.size();
  if (cutoff.has_value()) {
    if (*cutoff < 1) throw std::invalid_argument("average_precision: cutoff must be positive");
    limit = std::min(limit, static_cast<std::size_t>(*cutoff));
  }
  int correct = 0;
  double precision_sum = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    if (!truth.contains(ranked[i].api_id)) continue;
    ++correct;
    precision_sum += static_cast<double>(correct) / static_cast<double>(i + 1);
  }
  if (correct == 0) return 0.0;
  return precision_sum / static_cast<double>(correct);
}

double reciprocal_rank(const RankedList& ranked, const std::unordered_set<std::string>& truth) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (truth.contains(ranked[i].api_id)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

MetricSuite score_ranking(const RankedList& ranked, const std::unordered_set<std::string>& truth,
                          const std::vector<int>& hit_ns) {
  MetricSuite suite;
  for (const int n : hit_ns) {
    suite.hit_at[n] = hit_at_n(ranked, truth, n);
    suite.map_at[n] = average_precision(ranked, truth, n);
  }
  suite.map = average_precision(ranked, truth);
  suite.mrr = reciprocal_rank(ranked, truth);
  return suite;
}

MetricSuite mean_suite(const std::vector<MetricSuite>& suites) {
  MetricSuite mean;
  if (suites.empty()) return mean;
  for (const auto& suite : suites) {
    for (const auto& [n, value] : suite.hit_at) mean.hit_at[n] += value;
    for (const auto& [n, value] : suite.map_at) mean.map_at[n] += value;
    mean.map += suite.map;
    mean.mrr += suite.mrr;
  }
  const double count = static_cast<double>(suites.size());
  for (auto& [n, value] : mean.hit_at) value /= count;
  for (auto& [n, value] : mean.map_at) value /= count;
  mean.map /= count;
  mean.mrr /= count;
  return mean;
}

FoldPlan make_fold_plan(int n_projects, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("fold count must be at least 2");
  if (n_projects < folds) {
    throw std::invalid_argument("need at least " + std::to_string(folds) + " projects for " +
                                std::to_string(folds) + "-fold cross validation, have " +
                                std::to_string(n_projects));
  }
  std::vector<int> order(static_cast<std::size_t>(n_projects));
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(substream_seed(seed, "folds"));
  seeded_shuffle(order, rng);

  FoldPlan plan;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(folds), {});
  for (std::size_t i = 0; i < order.size(); ++i) {
    plan.folds[i % static_cast<std::size_t>(folds)].push_back(order[i]);
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

RankedList baseline_poprec(const Corpus& corpus, const std::vector<int>& train_projects,
                           const ApiCatalog& apis, std::uint64_t seed) {
  std::vector<double> counts(apis.size(), 0.0);
  for (const int p : train_projects) {
    for (const auto& api_id : corpus.projects[static_cast<std::size_t>(p)].used_apis) {
      auto it = apis.id_to_pos.find(api_id);
      if (it != apis.id_to_pos.end()) counts[static_cast<std::size_t>(it->second)] += 1.0;
    }
  }
  return sort_scored_apis(apis.ids, std::move(counts), api_tie_permutation(seed, apis.size()));
}

RankedList baseline_exemplar(const ProjectQuery& query, const ApiCatalog& apis,
                             std::uint64_t seed) {
  std::vector<double> scores(apis.size());
  for (std::size_t a = 0; a < apis.size(); ++a) {
    scores[a] = cosine(query.text_vec, apis.text_vecs[a]);
  }
  return sort_scored_apis(apis.ids, std::move(scores), api_tie_permutation(seed, apis.size()));
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

FoldOutcome evaluate_split(const Corpus& corpus, const CorpusDocs& docs,
                           const std::vector<int>& train_projects,
                           const std::vector<int>& test_projects, const EvalConfig& config) {
  const RunConfig& run = config.run;
  const FoldAssets assets = fit_fold(corpus, docs, train_projects, run);
  const FeatureExtractor extractor(assets.index, assets.apis, run.k_grid);

  const NegativeRate rate = resolve_negative_rate(corpus, assets.train_projects, run);
  const TrainingSet set =
      build_triples(make_training_projects(corpus, assets, extractor), extractor, rate, run.seed);
  if (set.triples.empty()) throw TrainingError("fold has no training triples");

  const auto train_start = clock_type::now();
  const TrainResult trained = train(set, run.lambda);
  const double train_seconds = seconds_since(train_start);

  const std::vector<int> tie_rank = api_tie_permutation(run.seed, assets.apis.size());
  const std::size_t d = static_cast<std::size_t>(extractor.dim());

  std::optional<RankedList> poprec_list;
  if (config.baselines) {
    poprec_list = baseline_poprec(corpus, assets.train_projects, assets.apis, run.seed);
  }

  std::vector<MetricSuite> model_suites, poprec_suites, exemplar_suites;
  const auto rank_start = clock_type::now();
  for (const int p : test_projects) {
    const auto& project = corpus.projects[static_cast<std::size_t>(p)];
    std::unordered_set<std::string> truth(project.used_apis.begin(), project.used_apis.end());

    ProjectQuery query;
    query.text_vec = tfidf_vector(docs.project_bags[static_cast<std::size_t>(p)], assets.vocab);
    query.keywords = project.keywords;
    const auto ctx = extractor.make_context(std::move(query));

    const std::vector<double> features = extractor.extract_all(ctx);
    std::vector<double> scores(assets.apis.size());
    for (std::size_t a = 0; a < assets.apis.size(); ++a) {
      scores[a] = score(trained.theta, std::span<const double>(features).subspan(a * d, d));
    }
    const RankedList ranked = sort_scored_apis(assets.apis.ids, std::move(scores), tie_rank);
    model_suites.push_back(score_ranking(ranked, truth, config.hit_ns));

    if (config.baselines) {
      poprec_suites.push_back(score_ranking(*poprec_list, truth, config.hit_ns));
      exemplar_suites.push_back(
          score_ranking(baseline_exemplar(ctx.query, assets.apis, run.seed), truth,
                        config.hit_ns));
    }
  }
  const double rank_seconds = seconds_since(rank_start);

  FoldOutcome outcome;
  outcome.n_test = static_cast<int>(test_projects.size());
  outcome.model = mean_suite(model_suites);
  if (config.baselines) {
    outcome.poprec = mean_suite(poprec_suites);
    outcome.exemplar = mean_suite(exemplar_suites);
  }
  outcome.theta = trained.theta;
  outcome.n_triples = set.triples.size();
  outcome.outer_iterations = trained.outer_iterations;
  outcome.final_objective = trained.objective_trace.back();
  outcome.train_seconds = train_seconds;
  outcome.rank_seconds_per_project =
      test_projects.empty() ? 0.0 : rank_seconds / static_cast<double>(test_projects.size());
  return outcome;
}

std::vector<int> complement(const std::vector<std::vector<int>>& folds, std::size_t skip) {
  std::vector<int> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == skip) continue;
    out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

EvalReport run_cv(const Corpus& corpus, const EvalConfig& config) {
  config.run.validate();
  const FoldPlan plan =
      make_fold_plan(static_cast<int>(corpus.projects.size()), config.run.folds, config.run.seed);
  const CorpusDocs docs = build_docs(corpus, config.run);

  EvalReport report;
  report.hit_ns = config.hit_ns;
  report.feature_labels = feature_names(config.run.k_grid);

  std::vector<MetricSuite> model_suites, poprec_suites, exemplar_suites;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    FoldOutcome outcome =
        evaluate_split(corpus, docs, complement(plan.folds, f), plan.folds[f], config);
    outcome.fold = static_cast<int>(f);
    model_suites.push_back(outcome.model);
    if (outcome.poprec) poprec_suites.push_back(*outcome.poprec);
    if (outcome.exemplar) exemplar_suites.push_back(*outcome.exemplar);
    report.folds.push_back(std::move(outcome));
  }

  report.aggregate = mean_suite(model_suites);
  if (!poprec_suites.empty()) report.poprec_aggregate = mean_suite(poprec_suites);
  if (!exemplar_suites.empty()) report.exemplar_aggregate = mean_suite(exemplar_suites);

  const std::size_t dim = report.folds.front().theta.size();
  report.mean_theta.assign(dim, 0.0);
  for (const auto& fold : report.folds) {
    for (std::size_t j = 0; j < dim; ++j) {
      report.mean_theta[j] += fold.theta[j] / static_cast<double>(report.folds.size());
    }
  }
  for (const auto& fold : report.folds) {
    report.mean_train_seconds += fold.train_seconds / static_cast<double>(report.folds.size());
    report.mean_rank_seconds_per_project +=
        fold.rank_seconds_per_project / static_cast<double>(report.folds.size());
  }

  if (!config.sweep_fractions.empty()) {
    report.sweep = training_size_sweep(corpus, config.sweep_fractions, config);
  }
  return report;
}

std::vector<SweepRow> training_size_sweep(const Corpus& corpus,
                                          const std::vector<double>& fractions,
                                          const EvalConfig& config) {
  config.run.validate();
  for (const double f : fractions) {
    if (!(f > 0.0 && f <= 1.0))
      throw std::invalid_argument("sweep fractions must lie in (0, 1]");
  }
  const FoldPlan plan =
      make_fold_plan(static_cast<int>(corpus.projects.size()), config.run.folds, config.run.seed);
  const CorpusDocs docs = build_docs(corpus, config.run);

  const std::vector<int>& test_projects = plan.folds.front();
  std::vector<int> pool = complement(plan.folds, 0);
  // One seeded order; each fraction takes a prefix, so the subsets are nested.
  SplitMix64 rng(substream_seed(config.run.seed, "sweep"));
  seeded_shuffle(pool, rng);

  std::vector<SweepRow> rows;
  for (const double fraction : fractions) {
    const auto n = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(pool.size()),
                         std::ceil(fraction * static_cast<double>(pool.size()))));
    const std::vector<int> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));

    SweepRow row;
    row.fraction = fraction;
    row.n_train = static_cast<int>(n);
    row.metrics = evaluate_split(corpus, docs, subset, test_projects, config).model;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

using ordered = nlohmann::ordered_json;

ordered suite_to_json(const MetricSuite& suite) {
  ordered out;
  for (const auto& [n, value] : suite.hit_at) out["hit@" + std::to_string(n)] = value;
  for (const auto& [n, value] : suite.map_at) out["map@" + std::to_string(n)] = value;
  out["map"] = suite.map;
  out["mrr"] = suite.mrr;
  return out;
}

void print_suite_row(std::ostream& os, const std::string& label, const MetricSuite& suite,
                     const std::vector<int>& hit_ns) {
  os << std::left << std::setw(14) << label << std::right << std::fixed << std::setprecision(3);
  for (const int n : hit_ns) os << std::setw(8) << suite.hit_at.at(n);
  for (const int n : hit_ns) os << std::setw(8) << suite.map_at.at(n);
  os << std::setw(8) << suite.map << std::setw(8) << suite.mrr << '\n';
}

void print_header(std::ostream& os, const std::vector<int>& hit_ns) {
  os << std::left << std::setw(14) << "approach" << std::right;
  for (const int n : hit_ns) os << std::setw(8) << ("hit@" + std::to_string(n));
  for (const int n : hit_ns) os << std::setw(8) << ("map@" + std::to_string(n));
  os << std::setw(8) << "map" << std::setw(8) << "mrr" << '\n';
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  ordered doc;
  doc["aggregate"] = suite_to_json(report.aggregate);
  if (report.poprec_aggregate) doc["poprec"] = suite_to_json(*report.poprec_aggregate);
  if (report.exemplar_aggregate) doc["exemplar"] = suite_to_json(*report.exemplar_aggregate);

  ordered weights;
  for (std::size_t j = 0; j < report.mean_theta.size(); ++j) {
    weights[report.feature_labels[j]] = report.mean_theta[j];
  }
  doc["mean_feature_weights"] = std::move(weights);

  ordered folds = ordered::array();
  for (const auto& fold : report.folds) {
    ordered rec;
    rec["fold"] = fold.fold;
    rec["n_test"] = fold.n_test;
    rec["model"] = suite_to_json(fold.model);
    if (fold.poprec) rec["poprec"] = suite_to_json(*fold.poprec);
    if (fold.exemplar) rec["exemplar"] = suite_to_json(*fold.exemplar);
    rec["theta"] = fold.theta;
    rec["n_triples"] = fold.n_triples;
    rec["outer_iterations"] = fold.outer_iterations;
    rec["final_objective"] = fold.final_objective;
    folds.push_back(std::move(rec));
  }
  doc["folds"] = std::move(folds);

  if (!report.sweep.empty()) {
    ordered sweep = ordered::array();
    for (const auto& row : report.sweep) {
      ordered rec;
      rec["fraction"] = row.fraction;
      rec["n_train"] = row.n_train;
      rec["metrics"] = suite_to_json(row.metrics);
      sweep.push_back(std::move(rec));
    }
    doc["sweep"] = std::move(sweep);
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  os << "cross-validation results (" << report.folds.size() << " folds)\n";
  print_header(os, report.hit_ns);
  print_suite_row(os, "model", report.aggregate, report.hit_ns);
  if (report.poprec_aggregate) print_suite_row(os, "poprec", *report.poprec_aggregate, report.hit_ns);
  if (report.exemplar_aggregate)
    print_suite_row(os, "exemplar", *report.exemplar_aggregate, report.hit_ns);

  os << "\nmean feature weights\n";
  for (std::size_t j = 0; j < report.mean_theta.size(); ++j) {
    os << "  " << std::left << std::setw(14) << report.feature_labels[j] << std::right
       << std::fixed << std::setprecision(4) << std::setw(9) << report.mean_theta[j] << '\n';
  }

  if (!report.sweep.empty()) {
    os << "\ntraining size sweep (fixed test fold)\n";
    os << std::left << std::setw(10) << "fraction" << std::setw(9) << "n_train" << std::right;
    for (const int n : report.hit_ns) os << std::setw(8) << ("hit@" + std::to_string(n));
    for (const int n : report.hit_ns) os << std::setw(8) << ("map@" + std::to_string(n));
    os << std::setw(8) << "map" << std::setw(8) << "mrr" << '\n';
    for (const auto& row : report.sweep) {
      os << std::left << std::fixed << std::setprecision(2) << std::setw(10) << row.fraction
         << std::setw(9) << row.n_train << std::right << std::setprecision(3);
      for (const int n : report.hit_ns) os << std::setw(8) << row.metrics.hit_at.at(n);
      for (const int n : report.hit_ns) os << std::setw(8) << row.metrics.map_at.at(n);
      os << std::setw(8) << row.metrics.map << std::setw(8) << row.metrics.mrr << '\n';
    }
  }
  return os.str();
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "scope,approach,fraction,n";
  for (const int n : report.hit_ns) os << ",hit@" << n;
  for (const int n : report.hit_ns) os << ",map@" << n;
  os << ",map,mrr\n";
  os << std::setprecision(17);

  auto emit = [&](const std::string& scope, const std::string& approach, const std::string& fraction,
                  int n_value, const MetricSuite& suite) {
    os << scope << ',' << approach << ',' << fraction << ',' << n_value;
    for (const int n : report.hit_ns) os << ',' << suite.hit_at.at(n);
    for (const int n : report.hit_ns) os << ',' << suite.map_at.at(n);
    os << ',' << suite.map << ',' << suite.mrr << '\n';
  };

  emit("aggregate", "model", "", static_cast<int>(report.folds.size()), report.aggregate);
  if (report.poprec_aggregate)
    emit("aggregate", "poprec", "", static_cast<int>(report.folds.size()),
         *report.poprec_aggregate);
  if (report.exemplar_aggregate)
    emit("aggregate", "exemplar", "", static_cast<int>(report.folds.size()),
         *report.exemplar_aggregate);
  for (const auto& fold : report.folds) {
    emit("fold" + std::to_string(fold.fold), "model", "", fold.n_test, fold.model);
    if (fold.poprec) emit("fold" + std::to_string(fold.fold), "poprec", "", fold.n_test, *fold.poprec);
    if (fold.exemplar)
      emit("fold" + std::to_string(fold.fold), "exemplar", "", fold.n_test, *fold.exemplar);
  }
  for (const auto& row : report.sweep) {
    std::ostringstream frac;
    frac << row.fraction;
    emit("sweep", "model", frac.str(), row.n_train, row.metrics);
  }
  return os.str();
}

}  // namespace apirank
