#include "apirank/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace apirank {

namespace {

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_token_char(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;  // keep multibyte sequences together
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Closed-class lexicon for the heuristic noun filter: pronouns, determiners,
// conjunctions, prepositions, auxiliaries. Lowercase, matched post-tokenize.
const std::unordered_set<std::string>& closed_class_words() {
  static const std::unordered_set<std::string> words = {
      // pronouns
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "my",
      "your", "his", "its", "our", "their", "mine", "yours", "hers", "ours", "theirs",
      "myself", "yourself", "himself", "herself", "itself", "ourselves", "yourselves",
      "themselves", "this", "that", "these", "those", "who", "whom", "whose", "which",
      "what", "someone", "something", "anyone", "anything", "everyone", "everything",
      "nobody", "nothing",
      // determiners
      "a", "an", "the", "some", "any", "each", "every", "either", "neither", "much",
      "many", "few", "several", "all", "both", "half", "no", "none", "such", "own",
      // conjunctions and subordinators
      "and", "or", "but", "nor", "so", "yet", "for", "because", "although", "though",
      "while", "whereas", "if", "unless", "until", "since", "when", "whenever", "where",
      "wherever", "after", "before", "once", "as", "than", "whether", "that", "how",
      "why",
      // prepositions
      "about", "above", "across", "against", "along", "among", "around", "at", "behind",
      "below", "beneath", "beside", "between", "beyond", "by", "despite", "down",
      "during", "except", "from", "in", "inside", "into", "like", "near", "of", "off",
      "on", "onto", "out", "outside", "over", "past", "through", "throughout", "to",
      "toward", "towards", "under", "underneath", "up", "upon", "with", "within",
      "without", "via", "per",
      // auxiliaries and modals
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
      "having", "do", "does", "did", "doing", "will", "would", "shall", "should", "can",
      "could", "may", "might", "must", "ought", "not",
  };
  return words;
}

class PassthroughNounFilter final : public NounFilter {
 public:
  std::vector<std::string> filter(const std::vector<std::string>& tokens) const override {
    return tokens;
  }
  std::string_view name() const override { return "passthrough"; }
};

class HeuristicNounFilter final : public NounFilter {
 public:
  std::vector<std::string> filter(const std::vector<std::string>& tokens) const override {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
      if (closed_class_words().contains(token)) continue;
      if (token.size() >= 4 && token.ends_with("ly")) continue;  // adverb suffix
      out.push_back(token);
    }
    return out;
  }
  std::string_view name() const override { return "heuristic"; }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_token_char(c)) {
      current += ascii_lower(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::unique_ptr<NounFilter> make_noun_filter(std::string_view kind) {
  if (kind == "heuristic") return std::make_unique<HeuristicNounFilter>();
  if (kind == "passthrough") return std::make_unique<PassthroughNounFilter>();
  throw std::invalid_argument("unknown noun filter: " + std::string(kind));
}

StopList::StopList(std::vector<std::string> words) {
  for (auto& word : words) words_.insert(std::move(word));
}

StopList StopList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stop list: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    // one word per line; tolerate surrounding whitespace and comments
    std::istringstream ss(line);
    std::string word;
    if (ss >> word && word[0] != '#') words.push_back(word);
  }
  return StopList(std::move(words));
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stoplist) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!stoplist.contains(token)) out.push_back(token);
  }
  return out;
}

TokenBag build_document(std::string_view description_text,
                        const std::vector<std::string>& keywords, const NounFilter& filter,
                        const StopList& stoplist) {
  std::vector<std::string> tokens = filter.filter(tokenize(description_text));
  for (const auto& keyword : keywords) {
    for (auto& token : tokenize(keyword)) tokens.push_back(std::move(token));
  }
  tokens = remove_stopwords(tokens, stoplist);

  TokenBag bag;
  for (const auto& token : tokens) ++bag.counts[porter_stem(token)];
  return bag;
}

}  // namespace apirank
