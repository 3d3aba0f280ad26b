#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apirank/textproc.hpp"

namespace apirank {

/// tf-idf weighted term vector. Entries are (term index, weight), strictly
/// increasing by index; zero weights are never stored.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;

  bool empty() const { return entries.empty(); }
  double norm_squared() const;
  double norm() const;
};

/// Dot product over the shared support (merge walk).
double dot(const SparseVector& a, const SparseVector& b);

/// Cosine similarity in [0,1]; 0 when either vector has zero norm.
double cosine(const SparseVector& a, const SparseVector& b);

/// Term universe of a fitted corpus: dense indices, per-term document
/// frequency, and the document count. Immutable after fit.
class Vocabulary {
 public:
  Vocabulary() = default;

  int term_index(const std::string& term) const {
    auto it = index_.find(term);
    return it == index_.end() ? -1 : it->second;
  }
  const std::string& term(int index) const { return terms_[static_cast<std::size_t>(index)]; }
  int df(int index) const { return df_[static_cast<std::size_t>(index)]; }
  int n_docs() const { return n_docs_; }
  std::size_t size() const { return terms_.size(); }

  /// Used by fit_vocabulary and the model deserializer.
  int add_term(const std::string& term, int df);
  void increment_df(int index) { ++df_[static_cast<std::size_t>(index)]; }
  void set_n_docs(int n) { n_docs_ = n; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> terms_;
  std::vector<int> df_;
  int n_docs_ = 0;
};

/// Builds the vocabulary over all terms of the given documents; df(t) counts
/// documents containing t. Throws std::invalid_argument on an empty collection.
Vocabulary fit_vocabulary(const std::vector<const TokenBag*>& documents);

/// weight(t) = count(t) * ln(n_docs / df(t)); out-of-vocabulary terms and
/// terms present in every document drop out.
SparseVector tfidf_vector(const TokenBag& doc, const Vocabulary& vocab);

}  // namespace apirank
