#pragma once

// Reference implementations used only by tests. They work on dense arrays
// and share no code with the sparse library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "domsim/domsim.hpp"

namespace domsim::testing {

using Dense = std::vector<double>;

inline double dense_cosine(const Dense& a, const Dense& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(1.0L - dot / (std::sqrt(na) * std::sqrt(nb)));
}

inline double dense_euclidean(const Dense& a, const Dense& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (static_cast<long double>(a[i]) - b[i]) * (a[i] - b[i]);
  return static_cast<double>(std::sqrt(s));
}

inline double dense_manhattan(const Dense& a, const Dense& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(static_cast<long double>(a[i]) - b[i]);
  return static_cast<double>(s);
}

inline double dense_chebyshev(const Dense& a, const Dense& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double dense_canberra(const Dense& a, const Dense& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double den = std::fabs(a[i]) + std::fabs(b[i]);
    if (den != 0) s += std::fabs(static_cast<long double>(a[i]) - b[i]) / den;
  }
  return static_cast<double>(s);
}

inline double dense_hamming(const Dense& a, const Dense& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return static_cast<double>(n);
}

inline double dense_distance(Metric m, const Dense& a, const Dense& b) {
  switch (m) {
    case Metric::Cosine: return dense_cosine(a, b);
    case Metric::Euclidean: return dense_euclidean(a, b);
    case Metric::Manhattan: return dense_manhattan(a, b);
    case Metric::Chebyshev: return dense_chebyshev(a, b);
    case Metric::Canberra: return dense_canberra(a, b);
    case Metric::Hamming: return dense_hamming(a, b);
  }
  return NAN;
}

inline Dense padded(Dense v, std::size_t n) {
  v.resize(n, 0.0);
  return v;
}

/// Naive k-NN: compute every distance with the library metric on padded
/// dense copies, fully sort by (distance, row), keep k.
inline std::vector<Neighbor> naive_knn(const KnowledgeBase& kb, const SparseVector& q, Metric m,
                                       std::size_t k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < kb.size(); ++i) {
    const auto row = SparseVector::from_dense(padded(kb.rows[i].to_dense(), q.dimension()));
    all.push_back({i, kb.labels[i], distance(m, q, row)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.row_index < b.row_index);
  });
  all.resize(k);
  return all;
}

/// Random non-negative sparse vector. With `integers` all values are small
/// whole numbers, otherwise uniform reals in (0, 10].
inline Dense random_dense(std::mt19937_64& rng, std::size_t dim, double density, bool integers,
                          bool nonzero = true) {
  std::bernoulli_distribution present(density);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> real(1e-3, 10.0);
  Dense v(dim, 0.0);
  for (auto& x : v) {
    if (present(rng)) x = integers ? count(rng) : real(rng);
  }
  if (nonzero && std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    std::uniform_int_distribution<std::size_t> at(0, dim - 1);
    v[at(rng)] = integers ? 1.0 : real(rng);
  }
  return v;
}

/// Knowledge base assembled directly from dense rows (no text pipeline).
inline KnowledgeBase kb_from_rows(const std::vector<Dense>& rows,
                                  const std::vector<std::size_t>& labels,
                                  std::size_t num_classes) {
  KnowledgeBase kb;
  const auto dim = rows.empty() ? 0 : rows.front().size();
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < dim; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%05zu", i);
    terms.emplace_back(buf);
  }
  kb.vocabulary = Vocabulary(terms);
  for (const auto& r : rows) kb.rows.push_back(SparseVector::from_dense(r));
  kb.labels = labels;
  for (std::size_t c = 0; c < num_classes; ++c) kb.categories.push_back("c" + std::to_string(c));
  std::sort(kb.categories.begin(), kb.categories.end());
  return kb;
}

struct SyntheticCorpusOptions {
  std::size_t categories = 10;
  std::size_t phrases_per_category = 300;
  std::size_t content_words = 5;       // distinct content words per phrase
  std::size_t category_pool = 60;      // category-specific words
  std::size_t shared_pool = 60;        // words any category may draw
  std::size_t topic_repeats = 3;       // repetitions of the category topic word
  double overlap = 0.0;                // probability a content word comes from the shared pool
  std::uint64_t seed = 2021;
  std::size_t length_jitter = 0;       // up to this many extra content words
};

/// Each phrase is the category's topic word repeated `topic_repeats` times
/// plus distinct content words. With overlap 0 the category vocabularies are
/// disjoint and every pair of same-category phrases shares the topic word.
inline Corpus synthetic_corpus(const SyntheticCorpusOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::bernoulli_distribution shared(o.overlap);
  std::uniform_int_distribution<std::size_t> own_word(0, o.category_pool - 1);
  std::uniform_int_distribution<std::size_t> shared_word(0, o.shared_pool - 1);
  Corpus corpus;
  for (std::size_t c = 0; c < o.categories; ++c) {
    const auto category = "cat" + std::to_string(c);
    const auto topic = "topic" + std::to_string(c);
    for (std::size_t p = 0; p < o.phrases_per_category; ++p) {
      std::vector<std::string> words;
      std::size_t length = o.content_words;
      if (o.length_jitter > 0) length += std::uniform_int_distribution<std::size_t>(0, o.length_jitter)(rng);
      while (words.size() < length) {
        auto w = shared(rng) ? "s" + std::to_string(shared_word(rng))
                             : "c" + std::to_string(c) + "w" + std::to_string(own_word(rng));
        if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(std::move(w));
      }
      std::string text;
      for (std::size_t r = 0; r < o.topic_repeats; ++r) text += topic + " ";
      for (const auto& w : words) text += w + " ";
      corpus.push_back({category, text});
    }
  }
  return corpus;
}

}  // namespace domsim::testing
