#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "apirank/corpus.hpp"
#include "apirank/eval.hpp"
#include "apirank/pipeline.hpp"
#include "apirank/ranker.hpp"

namespace py = pybind11;
using namespace apirank;

namespace {

RunConfig config_from_kwargs(double lambda, std::vector<int> k_grid,
                             std::optional<int> negative_rate, bool negative_rate_all,
                             std::uint64_t seed, int folds, const std::string& noun_filter,
                             bool include_project_name) {
  RunConfig config;
  config.lambda = lambda;
  config.k_grid = std::move(k_grid);
  if (negative_rate.has_value()) {
    config.negative_rate = negative_rate;
    config.negative_rate_is_auto = false;
  } else if (negative_rate_all) {
    config.negative_rate = std::nullopt;
    config.negative_rate_is_auto = false;
  }
  config.seed = seed;
  config.folds = folds;
  config.noun_filter = noun_filter;
  config.include_project_name = include_project_name;
  config.validate();
  return config;
}

py::dict suite_to_dict(const MetricSuite& suite) {
  py::dict out;
  for (const auto& [n, value] : suite.hit_at) out[py::str("hit@" + std::to_string(n))] = value;
  for (const auto& [n, value] : suite.map_at) out[py::str("map@" + std::to_string(n))] = value;
  out["map"] = suite.map;
  out["mrr"] = suite.mrr;
  return out;
}

RankedList ranked_from_ids(const std::vector<std::string>& ids) {
  RankedList ranked;
  ranked.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ranked.push_back({ids[i], static_cast<double>(ids.size() - i)});
  }
  return ranked;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Personalized web api recommendation: pairwise ranking model over "
            "text and neighbor features, with ranking metrics and cross validation.";

  // text processing
  m.def("tokenize", [](const std::string& text) { return tokenize(text); },
        py::arg("text"), "Lowercase tokens split on whitespace and punctuation.");
  m.def("porter_stem", [](const std::string& token) { return porter_stem(token); },
        py::arg("token"));
  m.def(
      "remove_stopwords",
      [](const std::vector<std::string>& tokens) {
        return remove_stopwords(tokens, StopList::smart_english());
      },
      py::arg("tokens"), "Drops SMART-list stop words, preserving order.");
  m.def(
      "build_document",
      [](const std::string& text, const std::vector<std::string>& keywords,
         const std::string& noun_filter) {
        const auto filter = make_noun_filter(noun_filter);
        return build_document(text, canonical_keywords(keywords), *filter).counts;
      },
      py::arg("text"), py::arg("keywords") = std::vector<std::string>{},
      py::arg("noun_filter") = "heuristic",
      "Full preprocessing pipeline; returns {token: count}.");
  m.def("keyword_similarity",
        [](std::vector<std::string> k1, std::vector<std::string> k2) {
          return keyword_similarity(canonical_keywords(std::move(k1)),
                                    canonical_keywords(std::move(k2)));
        },
        py::arg("keywords1"), py::arg("keywords2"));

  // corpus
  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("n_apis", [](const Corpus& c) { return c.apis.size(); })
      .def_property_readonly("n_projects", [](const Corpus& c) { return c.projects.size(); })
      .def("api_ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const auto& api : c.apis) ids.push_back(api.id);
             return ids;
           })
      .def("project_ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const auto& project : c.projects) ids.push_back(project.id);
             return ids;
           })
      .def("used_apis",
           [](const Corpus& c, const std::string& project_id) {
             const ProjectProfile* project = c.find_project(project_id);
             if (!project) throw py::key_error(project_id);
             return project->used_apis;
           })
      .def("save", [](const Corpus& c, const std::filesystem::path& path) {
        save_corpus(c, path);
      });

  m.def("load_corpus",
        [](const std::filesystem::path& path) { return load_corpus(path); },
        py::arg("path"));
  m.def(
      "clean",
      [](const Corpus& corpus) {
        CleanStats stats;
        Corpus cleaned = clean(corpus, &stats);
        return py::make_tuple(std::move(cleaned),
                              py::dict(py::arg("apis_removed") = stats.apis_removed,
                                       py::arg("projects_removed") = stats.projects_removed,
                                       py::arg("links_removed") = stats.links_removed));
      },
      py::arg("corpus"), "Returns (cleaned_corpus, removal_counts).");
  m.def("scrub_api_mentions", [](const Corpus& corpus) { return scrub_api_mentions(corpus); },
        py::arg("corpus"));

  // model
  py::class_<RankingModel>(m, "Model")
      .def_property_readonly("theta", [](const RankingModel& m_) { return m_.theta; })
      .def_property_readonly("lambda_", [](const RankingModel& m_) { return m_.lambda; })
      .def_property_readonly("k_grid", [](const RankingModel& m_) { return m_.config.k_grid; })
      .def_property_readonly("seed", [](const RankingModel& m_) { return m_.config.seed; })
      .def_property_readonly("feature_names",
                             [](const RankingModel& m_) { return feature_names(m_.config.k_grid); })
      .def(
          "recommend",
          [](const RankingModel& model, const std::string& description,
             const std::vector<std::string>& keywords, int top_n) {
            const RankedList ranked = recommend(model, description, keywords, top_n);
            std::vector<std::pair<std::string, double>> out;
            out.reserve(ranked.size());
            for (const auto& item : ranked) out.emplace_back(item.api_id, item.score);
            return out;
          },
          py::arg("description"), py::arg("keywords") = std::vector<std::string>{},
          py::arg("top_n") = 10, "Ranked (api_id, score) pairs, best first.")
      .def("save",
           [](const RankingModel& model, const std::filesystem::path& path) {
             save_model(model, path);
           });

  m.def("load_model", [](const std::filesystem::path& path) { return load_model(path); },
        py::arg("path"));
  m.def(
      "train",
      [](const Corpus& corpus, double lambda, std::vector<int> k_grid,
         std::optional<int> negative_rate, bool negative_rate_all, std::uint64_t seed, int folds,
         const std::string& noun_filter, bool include_project_name) {
        const RunConfig config =
            config_from_kwargs(lambda, std::move(k_grid), negative_rate, negative_rate_all, seed,
                               folds, noun_filter, include_project_name);
        TrainOutcome outcome = train_pipeline(corpus, config);
        return py::make_tuple(std::move(outcome.model),
                              py::dict(py::arg("objective") = outcome.optimization.objective_trace.back(),
                                       py::arg("iterations") = outcome.optimization.outer_iterations,
                                       py::arg("converged") = outcome.optimization.converged,
                                       py::arg("n_triples") = outcome.n_triples));
      },
      py::arg("corpus"), py::arg("lambda") = 1.0,
      py::arg("k_grid") = std::vector<int>{5, 10, 15, 20, 25},
      py::arg("negative_rate") = std::nullopt, py::arg("negative_rate_all") = false,
      py::arg("seed") = 42, py::arg("folds") = 10, py::arg("noun_filter") = "heuristic",
      py::arg("include_project_name") = false,
      "Trains the ranking model; returns (model, training_info).");

  // metrics: take a ranked id list plus the ground-truth id set
  m.def(
      "hit_at_n",
      [](const std::vector<std::string>& ranked_ids, const std::vector<std::string>& truth,
         int n) {
        return hit_at_n(ranked_from_ids(ranked_ids),
                        std::unordered_set<std::string>(truth.begin(), truth.end()), n);
      },
      py::arg("ranked_ids"), py::arg("truth"), py::arg("n"));
  m.def(
      "average_precision",
      [](const std::vector<std::string>& ranked_ids, const std::vector<std::string>& truth,
         std::optional<int> cutoff) {
        return average_precision(ranked_from_ids(ranked_ids),
                                 std::unordered_set<std::string>(truth.begin(), truth.end()),
                                 cutoff);
      },
      py::arg("ranked_ids"), py::arg("truth"), py::arg("cutoff") = std::nullopt);
  m.def(
      "reciprocal_rank",
      [](const std::vector<std::string>& ranked_ids, const std::vector<std::string>& truth) {
        return reciprocal_rank(ranked_from_ids(ranked_ids),
                               std::unordered_set<std::string>(truth.begin(), truth.end()));
      },
      py::arg("ranked_ids"), py::arg("truth"));

  // evaluation
  m.def(
      "evaluate",
      [](const Corpus& corpus, double lambda, std::vector<int> k_grid,
         std::optional<int> negative_rate, bool negative_rate_all, std::uint64_t seed, int folds,
         const std::string& noun_filter, bool include_project_name, bool baselines,
         std::vector<double> sweep_fractions) {
        EvalConfig config;
        config.run = config_from_kwargs(lambda, std::move(k_grid), negative_rate,
                                        negative_rate_all, seed, folds, noun_filter,
                                        include_project_name);
        config.baselines = baselines;
        config.sweep_fractions = std::move(sweep_fractions);
        const EvalReport report = run_cv(corpus, config);

        py::dict out;
        out["aggregate"] = suite_to_dict(report.aggregate);
        if (report.poprec_aggregate) out["poprec"] = suite_to_dict(*report.poprec_aggregate);
        if (report.exemplar_aggregate)
          out["exemplar"] = suite_to_dict(*report.exemplar_aggregate);
        py::dict weights;
        for (std::size_t j = 0; j < report.mean_theta.size(); ++j) {
          weights[py::str(report.feature_labels[j])] = report.mean_theta[j];
        }
        out["mean_feature_weights"] = weights;
        py::list folds_out;
        for (const auto& fold : report.folds) {
          py::dict rec;
          rec["fold"] = fold.fold;
          rec["n_test"] = fold.n_test;
          rec["model"] = suite_to_dict(fold.model);
          rec["theta"] = fold.theta;
          folds_out.append(rec);
        }
        out["folds"] = folds_out;
        if (!report.sweep.empty()) {
          py::list sweep_out;
          for (const auto& row : report.sweep) {
            py::dict rec;
            rec["fraction"] = row.fraction;
            rec["n_train"] = row.n_train;
            rec["metrics"] = suite_to_dict(row.metrics);
            sweep_out.append(rec);
          }
          out["sweep"] = sweep_out;
        }
        out["text"] = report_to_text(report);
        return out;
      },
      py::arg("corpus"), py::arg("lambda") = 1.0,
      py::arg("k_grid") = std::vector<int>{5, 10, 15, 20, 25},
      py::arg("negative_rate") = std::nullopt, py::arg("negative_rate_all") = false,
      py::arg("seed") = 42, py::arg("folds") = 10, py::arg("noun_filter") = "heuristic",
      py::arg("include_project_name") = false, py::arg("baselines") = false,
      py::arg("sweep_fractions") = std::vector<double>{},
      "Cross-validated Hit@N / MAP@N / MAP / MRR, optionally with baselines and "
      "a training-size sweep.");
}
