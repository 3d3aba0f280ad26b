#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "apirank/ranker.hpp"

// Model file layout (version 1): theta, lambda, log_base, k_grid, seed, and
// the fitted vocabulary, plus the deployment payload the scorer needs at
// recommendation time: the api catalog and the training-project neighbor
// index (vectors, keywords, usage links).

namespace apirank {

namespace {

using ordered = nlohmann::ordered_json;
using nlohmann::json;

ordered vec_to_json(const SparseVector& vec) {
  ordered out = ordered::array();
  for (const auto& [index, weight] : vec.entries) out.push_back(ordered::array({index, weight}));
  return out;
}

SparseVector vec_from_json(const json& in) {
  SparseVector vec;
  vec.entries.reserve(in.size());
  for (const auto& entry : in) {
    vec.entries.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
  }
  return vec;
}

}  // namespace

void save_model(const RankingModel& model, const std::filesystem::path& path) {
  ordered doc;
  doc["version"] = 1;
  doc["theta"] = model.theta;
  doc["lambda"] = model.lambda;
  doc["log_base"] = model.config.log_base;
  doc["k_grid"] = model.config.k_grid;
  doc["seed"] = model.config.seed;
  doc["noun_filter"] = model.config.noun_filter;
  doc["include_project_name"] = model.config.include_project_name;

  ordered vocab;
  vocab["n_docs"] = model.vocab.n_docs();
  vocab["log_base"] = model.config.log_base;
  ordered terms = ordered::array();
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const int index = static_cast<int>(i);
    terms.push_back(ordered::array({model.vocab.term(index), index, model.vocab.df(index)}));
  }
  vocab["terms"] = std::move(terms);
  doc["vocab"] = std::move(vocab);

  ordered apis = ordered::array();
  for (std::size_t a = 0; a < model.apis.size(); ++a) {
    ordered rec;
    rec["id"] = model.apis.ids[a];
    rec["vec"] = vec_to_json(model.apis.text_vecs[a]);
    rec["keywords"] = model.apis.keywords[a];
    apis.push_back(std::move(rec));
  }
  doc["apis"] = std::move(apis);

  ordered projects = ordered::array();
  for (const auto& entry : model.index.entries) {
    ordered rec;
    rec["id"] = entry.project_id;
    rec["vec"] = vec_to_json(entry.text_vec);
    rec["keywords"] = entry.keywords;
    std::vector<std::string> used(entry.used_apis.begin(), entry.used_apis.end());
    std::sort(used.begin(), used.end());
    rec["used_apis"] = std::move(used);
    projects.push_back(std::move(rec));
  }
  doc["projects"] = std::move(projects);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << doc.dump() << '\n';
}

RankingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed model file " + path.string() + ": " + e.what());
  }

  const int version = doc.at("version").get<int>();
  if (version != 1) {
    throw std::runtime_error("unsupported model file version " + std::to_string(version));
  }

  RankingModel model;
  model.theta = doc.at("theta").get<std::vector<double>>();
  model.lambda = doc.at("lambda").get<double>();
  model.config.log_base = doc.at("log_base").get<std::string>();
  model.config.k_grid = doc.at("k_grid").get<std::vector<int>>();
  model.config.seed = doc.at("seed").get<std::uint64_t>();
  model.config.noun_filter = doc.value("noun_filter", std::string("heuristic"));
  model.config.include_project_name = doc.value("include_project_name", false);

  const json& vocab = doc.at("vocab");
  std::vector<std::pair<std::string, int>> terms;  // (term, df) by index
  terms.resize(vocab.at("terms").size());
  for (const auto& row : vocab.at("terms")) {
    const auto index = row.at(1).get<std::size_t>();
    terms.at(index) = {row.at(0).get<std::string>(), row.at(2).get<int>()};
  }
  for (const auto& [term, df] : terms) model.vocab.add_term(term, df);
  model.vocab.set_n_docs(vocab.at("n_docs").get<int>());

  for (const auto& rec : doc.at("apis")) {
    model.apis.ids.push_back(rec.at("id").get<std::string>());
    model.apis.text_vecs.push_back(vec_from_json(rec.at("vec")));
    model.apis.keywords.push_back(rec.at("keywords").get<std::vector<std::string>>());
  }
  model.apis.finalize();

  for (const auto& rec : doc.at("projects")) {
    NeighborIndex::Entry entry;
    entry.project_id = rec.at("id").get<std::string>();
    entry.text_vec = vec_from_json(rec.at("vec"));
    entry.keywords = rec.at("keywords").get<std::vector<std::string>>();
    for (const auto& api_id : rec.at("used_apis")) {
      entry.used_apis.insert(api_id.get<std::string>());
    }
    model.index.entries.push_back(std::move(entry));
  }
  model.index.finalize(model.config.seed);
  return model;
}

}  // namespace apirank
