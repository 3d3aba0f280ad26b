#include "apirank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace apirank {

namespace {

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_word_char(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;  // keep multibyte sequences intact
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return u == ' ' || u == '\t' || u == '\n' || u == '\r' || u == '\f' || u == '\v';
}

std::string ascii_lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

}  // namespace

std::string ApiProfile::description_text() const {
  std::string out = name;
  if (!short_description.empty()) {
    if (!out.empty()) out += ' ';
    out += short_description;
  }
  if (!long_description.empty()) {
    if (!out.empty()) out += ' ';
    out += long_description;
  }
  return out;
}

std::vector<std::string> canonical_keywords(std::vector<std::string> raw) {
  for (auto& kw : raw) {
    for (char& c : kw) c = ascii_lower(c);
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  std::erase_if(raw, [](const std::string& kw) { return kw.empty(); });
  return raw;
}

void Corpus::reindex() {
  api_index_.clear();
  project_index_.clear();
  for (std::size_t i = 0; i < apis.size(); ++i) api_index_.emplace(apis[i].id, i);
  for (std::size_t i = 0; i < projects.size(); ++i)
    project_index_.emplace(projects[i].id, i);
}

const ApiProfile* Corpus::find_api(std::string_view id) const {
  auto it = api_index_.find(std::string(id));
  return it == api_index_.end() ? nullptr : &apis[it->second];
}

const ProjectProfile* Corpus::find_project(std::string_view id) const {
  auto it = project_index_.find(std::string(id));
  return it == project_index_.end() ? nullptr : &projects[it->second];
}

std::vector<std::pair<std::string, std::string>> Corpus::unresolved_links() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& project : projects) {
    for (const auto& api_id : project.used_apis) {
      if (find_api(api_id) == nullptr) out.emplace_back(project.id, api_id);
    }
  }
  return out;
}

namespace {

using nlohmann::json;

std::string require_string(const json& record, const char* field, int line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw CorpusError("line " + std::to_string(line) + ": record is missing string field \"" +
                          field + "\"",
                      line);
  }
  return it->get<std::string>();
}

std::string optional_string(const json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string()) throw json::type_error::create(302, "expected string", &record);
  return it->get<std::string>();
}

std::vector<std::string> optional_string_array(const json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return {};
  return it->get<std::vector<std::string>>();
}

bool optional_bool(const json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return false;
  return it->get<bool>();
}

}  // namespace

Corpus load_corpus(std::istream& in, std::string_view provenance, CorpusFormat format) {
  (void)format;  // jsonl is the only corpus format
  Corpus corpus;
  corpus.provenance = std::string(provenance);

  std::unordered_map<std::string, int> api_lines;      // id -> first line
  std::unordered_map<std::string, int> project_lines;  // id -> first line

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](char c) { return is_space(c); })) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": malformed record: " + e.what(),
                        line_no);
    }

    try {
      if (!record.is_object()) {
        throw CorpusError("line " + std::to_string(line_no) + ": record is not a JSON object",
                          line_no);
      }
      const std::string kind = require_string(record, "kind", line_no);
      if (kind == "api") {
        ApiProfile api;
        api.id = require_string(record, "id", line_no);
        auto [it, inserted] = api_lines.emplace(api.id, line_no);
        if (!inserted) {
          throw CorpusError("line " + std::to_string(line_no) + ": duplicate api id \"" + api.id +
                                "\" (first seen at line " + std::to_string(it->second) + ")",
                            line_no);
        }
        api.name = optional_string(record, "name");
        api.short_description = optional_string(record, "short_description");
        api.long_description = optional_string(record, "long_description");
        api.keywords = canonical_keywords(optional_string_array(record, "keywords"));
        api.deprecated = optional_bool(record, "deprecated");
        corpus.apis.push_back(std::move(api));
      } else if (kind == "project") {
        ProjectProfile project;
        project.id = require_string(record, "id", line_no);
        auto [it, inserted] = project_lines.emplace(project.id, line_no);
        if (!inserted) {
          throw CorpusError("line " + std::to_string(line_no) + ": duplicate project id \"" +
                                project.id + "\" (first seen at line " + std::to_string(it->second) +
                                ")",
                            line_no);
        }
        project.name = optional_string(record, "name");
        project.long_description = optional_string(record, "long_description");
        project.keywords = canonical_keywords(optional_string_array(record, "keywords"));
        project.used_apis = optional_string_array(record, "used_apis");
        std::sort(project.used_apis.begin(), project.used_apis.end());
        project.used_apis.erase(std::unique(project.used_apis.begin(), project.used_apis.end()),
                                project.used_apis.end());
        std::erase_if(project.used_apis, [](const std::string& id) { return id.empty(); });
        project.deprecated = optional_bool(record, "deprecated");
        corpus.projects.push_back(std::move(project));
      } else {
        throw CorpusError(
            "line " + std::to_string(line_no) + ": unknown record kind \"" + kind + "\"", line_no);
      }
    } catch (const json::exception& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": malformed record: " + e.what(),
                        line_no);
    }
  }

  corpus.reindex();
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path.string());
  return load_corpus(in, path.string(), format);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  using ordered = nlohmann::ordered_json;
  for (const auto& api : corpus.apis) {
    ordered record;
    record["kind"] = "api";
    record["id"] = api.id;
    record["name"] = api.name;
    record["short_description"] = api.short_description;
    record["long_description"] = api.long_description;
    record["keywords"] = api.keywords;
    record["deprecated"] = api.deprecated;
    out << record.dump() << '\n';
  }
  for (const auto& project : corpus.projects) {
    ordered record;
    record["kind"] = "project";
    record["id"] = project.id;
    record["name"] = project.name;
    record["long_description"] = project.long_description;
    record["keywords"] = project.keywords;
    record["used_apis"] = project.used_apis;
    record["deprecated"] = project.deprecated;
    out << record.dump() << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write corpus file: " + path.string());
  save_corpus(corpus, out);
}

Corpus clean(const Corpus& corpus, CleanStats* stats) {
  CleanStats local;
  Corpus out;
  out.provenance = corpus.provenance;

  std::unordered_set<std::string> kept_apis;
  for (const auto& api : corpus.apis) {
    if (api.deprecated) {
      ++local.apis_removed;
      continue;
    }
    kept_apis.insert(api.id);
    out.apis.push_back(api);
  }

  for (const auto& project : corpus.projects) {
    if (project.deprecated) {
      ++local.projects_removed;
      continue;
    }
    ProjectProfile kept = project;
    std::erase_if(kept.used_apis, [&](const std::string& id) {
      if (kept_apis.contains(id)) return false;
      ++local.links_removed;
      return true;
    });
    if (kept.used_apis.empty()) {
      ++local.projects_removed;
      continue;
    }
    out.projects.push_back(std::move(kept));
  }

  out.reindex();
  if (stats) *stats = local;
  return out;
}

std::string remove_name_mentions(std::string_view text, std::string_view name) {
  // Trim the pattern; an empty or whitespace-only name matches nothing.
  std::size_t begin = 0, end = name.size();
  while (begin < end && is_space(name[begin])) ++begin;
  while (end > begin && is_space(name[end - 1])) --end;
  const std::string pattern = ascii_lower_copy(name.substr(begin, end - begin));
  if (pattern.empty()) return std::string(text);

  std::string result(text);
  std::string lowered = ascii_lower_copy(result);

  std::size_t pos = 0;
  while (pos + pattern.size() <= lowered.size()) {
    const std::size_t hit = lowered.find(pattern, pos);
    if (hit == std::string::npos) break;
    const std::size_t after = hit + pattern.size();
    const bool left_ok = hit == 0 || !is_word_char(lowered[hit - 1]);
    const bool right_ok = after == lowered.size() || !is_word_char(lowered[after]);
    if (left_ok && right_ok) {
      result.erase(hit, pattern.size());
      lowered.erase(hit, pattern.size());
      pos = hit;  // rescan: deletion may expose a new occurrence
    } else {
      pos = hit + 1;
    }
  }
  return result;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

Corpus scrub_api_mentions(const Corpus& corpus) {
  Corpus out = corpus;
  for (auto& project : out.projects) {
    std::vector<std::string> names;
    names.reserve(project.used_apis.size());
    for (const auto& api_id : project.used_apis) {
      if (const ApiProfile* api = corpus.find_api(api_id)) names.push_back(api->name);
    }

    // Removing one name (or collapsing whitespace) can expose another
    // occurrence, so iterate to a fixed point; the text shrinks every round.
    std::string current = project.long_description;
    for (;;) {
      std::string next = current;
      for (const auto& name : names) next = remove_name_mentions(next, name);
      next = normalize_whitespace(next);
      if (next == current) break;
      current = std::move(next);
    }
    project.long_description = std::move(current);
  }
  out.reindex();
  return out;
}

}  // namespace apirank
