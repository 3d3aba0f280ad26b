// apirank: learns a per-project ranking of web apis from historical usage
// data and serves recommendations for new project profiles.
//
// Subcommands: ingest, train, recommend, evaluate.
// Exit codes: 0 success, 1 internal/training failure, 2 usage/input error.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apirank/corpus.hpp"
#include "apirank/eval.hpp"
#include "apirank/pipeline.hpp"
#include "apirank/ranker.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
  apirank::RunConfig run;
  std::string negative_rate_text = "auto";
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--lambda", opts.run.lambda, "L2 regularization strength")
      ->capture_default_str();
  cmd->add_option("--k-grid", opts.run.k_grid,
                  "Neighbor counts for the collaborative features")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--negative-rate", opts.negative_rate_text,
                  "Negatives per positive: ALL, auto, or a positive integer")
      ->capture_default_str();
  cmd->add_option("--triple-budget", opts.run.triple_budget,
                  "Triple count above which auto sampling switches to rate 10")
      ->capture_default_str();
  cmd->add_option("--seed", opts.run.seed, "Root random seed")
      ->envname("APIRANK_SEED")
      ->capture_default_str();
  cmd->add_option("--stoplist", opts.run.stoplist_path,
                  "Stop word file, one word per line (default: built-in SMART list)");
  cmd->add_option("--noun-filter", opts.run.noun_filter, "heuristic or passthrough")
      ->check(CLI::IsMember({"heuristic", "passthrough"}))
      ->capture_default_str();
  cmd->add_flag("--include-project-name", opts.run.include_project_name,
                "Prepend the project name to its description text");
}

void resolve_negative_rate_flag(CliOptions& opts) {
  std::string text = opts.negative_rate_text;
  for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (text == "auto") {
    opts.run.negative_rate_is_auto = true;
    opts.run.negative_rate = std::nullopt;
  } else if (text == "all") {
    opts.run.negative_rate_is_auto = false;
    opts.run.negative_rate = std::nullopt;
  } else {
    opts.run.negative_rate_is_auto = false;
    opts.run.negative_rate = std::stoi(text);
  }
}

std::vector<std::string> split_keywords(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin != std::string::npos) out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

int cmd_ingest(const std::string& raw_path, const std::string& out_path) {
  apirank::Corpus corpus = apirank::load_corpus(raw_path);
  apirank::CleanStats stats;
  corpus = apirank::clean(corpus, &stats);
  corpus = apirank::scrub_api_mentions(corpus);
  apirank::save_corpus(corpus, std::filesystem::path(out_path));
  std::cout << "removed " << stats.apis_removed << " deprecated apis, " << stats.projects_removed
            << " projects, " << stats.links_removed << " dangling usage links\n";
  std::cout << "kept " << corpus.apis.size() << " apis, " << corpus.projects.size()
            << " projects -> " << out_path << "\n";
  return kExitSuccess;
}

int cmd_train(CliOptions& opts, const std::string& corpus_path, const std::string& model_path,
              const std::string& dump_features_path) {
  resolve_negative_rate_flag(opts);
  opts.run.validate();

  const apirank::Corpus corpus = apirank::load_corpus(corpus_path);
  apirank::TrainingSet training_set;
  const apirank::TrainOutcome outcome =
      apirank::train_pipeline(corpus, opts.run, {},
                              dump_features_path.empty() ? nullptr : &training_set);
  apirank::save_model(outcome.model, model_path);

  if (!dump_features_path.empty()) {
    apirank::dump_feature_matrix(training_set, outcome.model.apis, opts.run.k_grid,
                                 dump_features_path);
  }

  const auto& optimization = outcome.optimization;
  std::cout << "trained on " << outcome.n_triples << " triples ("
            << outcome.projects_skipped << " projects skipped)\n";
  std::cout << "outer iterations: " << optimization.outer_iterations
            << (optimization.converged ? " (converged)" : " (iteration limit)") << "\n";
  std::cout.precision(10);
  std::cout << "final objective R: " << optimization.objective_trace.back() << "\n";
  std::cout << "theta:";
  const auto names = apirank::feature_names(opts.run.k_grid);
  for (std::size_t j = 0; j < optimization.theta.size(); ++j) {
    std::cout << ' ' << names[j] << '=' << optimization.theta[j];
  }
  std::cout << "\nmodel written to " << model_path << "\n";
  return kExitSuccess;
}

int cmd_recommend(const std::string& model_path, const std::string& description,
                  const std::string& keywords_csv, const std::string& profile_path, int top_n) {
  if (!std::filesystem::exists(model_path)) {
    throw std::invalid_argument("model file not found: " + model_path);
  }
  const apirank::RankingModel model = apirank::load_model(model_path);

  std::string text = description;
  std::vector<std::string> keywords = split_keywords(keywords_csv);
  if (!profile_path.empty()) {
    const apirank::Corpus profile = apirank::load_corpus(profile_path);
    if (profile.projects.size() != 1) {
      throw apirank::CorpusError("profile file must contain exactly one project record");
    }
    text = profile.projects.front().long_description;
    keywords = profile.projects.front().keywords;
  }

  const apirank::RankedList ranked = apirank::recommend(model, text, keywords, top_n);
  std::cout.precision(17);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::cout << (i + 1) << '\t' << ranked[i].api_id << '\t' << ranked[i].score << '\n';
  }
  return kExitSuccess;
}

int cmd_evaluate(CliOptions& opts, const std::string& corpus_path, bool baselines, bool sweep,
                 const std::vector<double>& fractions, const std::string& out_json,
                 const std::string& out_text, const std::string& out_csv) {
  resolve_negative_rate_flag(opts);
  opts.run.validate();

  apirank::EvalConfig config;
  config.run = opts.run;
  config.baselines = baselines;
  if (sweep) {
    config.sweep_fractions = fractions;
    if (config.sweep_fractions.empty()) {
      config.sweep_fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    }
  }

  const apirank::Corpus corpus = apirank::load_corpus(corpus_path);
  const apirank::EvalReport report = apirank::run_cv(corpus, config);

  const std::string text = apirank::report_to_text(report);
  std::cout << text;
  std::cout.precision(4);
  std::cout << "\nmean training time per fold: " << report.mean_train_seconds << " s\n";
  std::cout << "mean recommendation time per project: " << report.mean_rank_seconds_per_project
            << " s\n";

  if (!out_json.empty()) {
    std::ofstream out(out_json);
    if (!out) throw std::runtime_error("cannot write " + out_json);
    out << apirank::report_to_json(report);
  }
  if (!out_text.empty()) {
    std::ofstream out(out_text);
    if (!out) throw std::runtime_error("cannot write " + out_text);
    out << text;
  }
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << apirank::report_to_csv(report);
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"apirank: personalized web api recommendation"};
  app.require_subcommand(1);

  CliOptions opts;

  // ingest
  std::string raw_path, out_path;
  CLI::App* ingest = app.add_subcommand("ingest", "Load, clean, and scrub a raw corpus");
  ingest->add_option("raw", raw_path, "Raw corpus (jsonl)")->required();
  ingest->add_option("out", out_path, "Cleaned corpus output path")->required();

  // train
  std::string corpus_path, model_path, dump_features_path;
  CLI::App* train = app.add_subcommand("train", "Train a ranking model on a cleaned corpus");
  train->add_option("--corpus", corpus_path, "Cleaned corpus (jsonl)")->required();
  train->add_option("--model-out", model_path, "Model output path")->required();
  train->add_option("--dump-features", dump_features_path,
                    "Optional csv dump of the training feature matrix");
  add_common_flags(train, opts);

  // recommend
  std::string rec_model, rec_description, rec_keywords, rec_profile;
  int rec_top_n = 10;
  CLI::App* rec = app.add_subcommand("recommend", "Rank apis for a new project profile");
  rec->add_option("--model", rec_model, "Trained model file")->required();
  rec->add_option("--description", rec_description, "Project description text");
  rec->add_option("--keywords", rec_keywords, "Comma-separated project keywords");
  rec->add_option("--profile", rec_profile, "Single project record (jsonl) instead of flags");
  rec->add_option("--top-n", rec_top_n, "List length")->capture_default_str();

  // evaluate
  std::string eval_corpus, out_json, out_text, out_csv;
  bool baselines = false;
  bool sweep = false;
  std::vector<double> fractions;
  CLI::App* eval = app.add_subcommand("evaluate", "Cross-validated evaluation");
  eval->add_option("--corpus", eval_corpus, "Cleaned corpus (jsonl)")->required();
  eval->add_option("--folds", opts.run.folds, "Cross-validation fold count")
      ->capture_default_str();
  eval->add_flag("--baselines", baselines, "Also score popularity and text-similarity baselines");
  eval->add_flag("--sweep", sweep, "Run the training-size sweep on a fixed test fold");
  eval->add_option("--sweep-fractions", fractions, "Training fractions for --sweep")
      ->delimiter(',');
  eval->add_option("--out-json", out_json, "Write the report as json");
  eval->add_option("--out-text", out_text, "Write the report as an aligned text table");
  eval->add_option("--out-csv", out_csv, "Write the report as csv");
  add_common_flags(eval, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(raw_path, out_path);
    if (train->parsed()) return cmd_train(opts, corpus_path, model_path, dump_features_path);
    if (rec->parsed())
      return cmd_recommend(rec_model, rec_description, rec_keywords, rec_profile, rec_top_n);
    if (eval->parsed())
      return cmd_evaluate(opts, eval_corpus, baselines, sweep, fractions, out_json, out_text,
                          out_csv);
  } catch (const apirank::CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const apirank::TrainingError& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
