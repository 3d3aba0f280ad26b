#include "apirank/vsm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apirank {

double SparseVector::norm_squared() const {
  double s = 0.0;
  for (const auto& [index, weight] : entries) s += weight * weight;
  return s;
}

double SparseVector::norm() const { return std::sqrt(norm_squared()); }

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double value = dot(a, b) / (na * nb);
  return std::clamp(value, 0.0, 1.0);
}

int Vocabulary::add_term(const std::string& term, int df) {
  auto [it, inserted] = index_.emplace(term, static_cast<int>(terms_.size()));
  if (!inserted) return it->second;
  terms_.push_back(term);
  df_.push_back(df);
  return it->second;
}

Vocabulary fit_vocabulary(const std::vector<const TokenBag*>& documents) {
  if (documents.empty()) {
    throw std::invalid_argument("fit_vocabulary: document collection is empty");
  }
  Vocabulary vocab;
  for (const TokenBag* doc : documents) {
    for (const auto& [term, count] : doc->counts) {
      (void)count;
      vocab.increment_df(vocab.add_term(term, 0));
    }
  }
  vocab.set_n_docs(static_cast<int>(documents.size()));
  return vocab;
}

SparseVector tfidf_vector(const TokenBag& doc, const Vocabulary& vocab) {
  SparseVector vec;
  vec.entries.reserve(doc.counts.size());
  for (const auto& [term, count] : doc.counts) {
    const int index = vocab.term_index(term);
    if (index < 0) continue;
    const double idf = std::log(static_cast<double>(vocab.n_docs()) / vocab.df(index));
    const double weight = static_cast<double>(count) * idf;
    if (weight != 0.0) vec.entries.emplace_back(index, weight);
  }
  std::sort(vec.entries.begin(), vec.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return vec;
}

}  // namespace apirank
