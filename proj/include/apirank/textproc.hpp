#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace apirank {

/// Bag (multiset) of processed tokens. Every token is lowercase, whitespace
/// free, stemmed, and not a stop word.
struct TokenBag {
  std::map<std::string, int> counts;

  bool empty() const { return counts.empty(); }
  int count(const std::string& token) const {
    auto it = counts.find(token);
    return it == counts.end() ? 0 : it->second;
  }
};

/// Splits on whitespace and punctuation, lowercases, drops empties. Order is
/// preserved so context-aware noun filters can be plugged in.
std::vector<std::string> tokenize(std::string_view text);

/// Keeps the tokens that plausibly act as nouns. The contract is that the
/// output is an order-preserving subsequence of the input.
class NounFilter {
 public:
  virtual ~NounFilter() = default;
  virtual std::vector<std::string> filter(const std::vector<std::string>& tokens) const = 0;
  virtual std::string_view name() const = 0;
};

/// "heuristic": drops closed-class words (pronouns, determiners, conjunctions,
/// prepositions, auxiliaries) and "-ly" adverbs, keeps the rest.
/// "passthrough": keeps everything.
std::unique_ptr<NounFilter> make_noun_filter(std::string_view kind);

class StopList {
 public:
  StopList() = default;
  explicit StopList(std::vector<std::string> words);

  /// The SMART English stop list (embedded copy, also shipped in data/).
  static const StopList& smart_english();
  static StopList from_file(const std::filesystem::path& path);

  bool contains(const std::string& token) const { return words_.contains(token); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Order-preserving removal of stop words.
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stoplist);

/// Porter stemmer. Tokens that are not lowercase a-z words (digits, multibyte
/// text) pass through unchanged.
std::string porter_stem(std::string_view token);

/// Full preprocessing pipeline: tokenize the description, apply the noun
/// filter, merge keyword tokens (keywords bypass the filter), remove stop
/// words, stem, count.
TokenBag build_document(std::string_view description_text,
                        const std::vector<std::string>& keywords, const NounFilter& filter,
                        const StopList& stoplist = StopList::smart_english());

}  // namespace apirank
