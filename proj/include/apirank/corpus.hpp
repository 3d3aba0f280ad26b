#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace apirank {

/// Raised on malformed corpus input. `line` is 1-based, 0 when not tied to a
/// specific line (e.g. missing file).
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string message, int line = 0)
      : std::runtime_error(std::move(message)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ApiProfile {
  std::string id;
  std::string name;
  std::string short_description;
  std::string long_description;
  std::vector<std::string> keywords;  // lowercase, sorted, unique
  bool deprecated = false;

  /// The merged text an API is represented by: name + short + long description.
  std::string description_text() const;
};

struct ProjectProfile {
  std::string id;
  std::string name;
  std::string long_description;
  std::vector<std::string> keywords;   // lowercase, sorted, unique
  std::vector<std::string> used_apis;  // sorted, unique api ids
  bool deprecated = false;

  /// A project is represented by its long description only.
  const std::string& description_text() const { return long_description; }
};

struct CleanStats {
  int apis_removed = 0;      // deprecated api records dropped
  int projects_removed = 0;  // deprecated or left without any usable api
  int links_removed = 0;     // used_apis entries that did not resolve
};

class Corpus {
 public:
  std::vector<ApiProfile> apis;
  std::vector<ProjectProfile> projects;
  std::string provenance;

  const ApiProfile* find_api(std::string_view id) const;
  const ProjectProfile* find_project(std::string_view id) const;

  /// (project id, api id) pairs whose api id does not resolve. Empty after clean().
  std::vector<std::pair<std::string, std::string>> unresolved_links() const;

  /// Rebuilds the id lookup tables; called by the loader and mutating ops.
  void reindex();

 private:
  std::unordered_map<std::string, std::size_t> api_index_;
  std::unordered_map<std::string, std::size_t> project_index_;
};

enum class CorpusFormat { jsonl };

Corpus load_corpus(const std::filesystem::path& path,
                   CorpusFormat format = CorpusFormat::jsonl);
Corpus load_corpus(std::istream& in, std::string_view provenance = "",
                   CorpusFormat format = CorpusFormat::jsonl);

void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Drops deprecated records, prunes unresolved usage links, and drops projects
/// left without any used api. Total: never fails.
Corpus clean(const Corpus& corpus, CleanStats* stats = nullptr);

/// Deletes every exact, case-insensitive, word-bounded occurrence of each used
/// api's name from the owning project's long description, then normalizes
/// whitespace. Expects a cleaned corpus. Idempotent for a fixed name set.
Corpus scrub_api_mentions(const Corpus& corpus);

/// Single-name removal used by scrub_api_mentions; exposed for tests.
std::string remove_name_mentions(std::string_view text, std::string_view name);

/// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

/// Lowercases, deduplicates, sorts, and drops empty entries.
std::vector<std::string> canonical_keywords(std::vector<std::string> raw);

}  // namespace apirank
