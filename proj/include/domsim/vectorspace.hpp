#pragma once

// Bag-of-words vector space: vocabulary, sparse count vectors and the
// out-of-vocabulary query extension.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "domsim/error.hpp"
#include "domsim/text_pipeline.hpp"

namespace domsim {

inline constexpr double kDefaultPenaltyFactor = 2.5;

enum class VectorMode { Count, Binary };

constexpr std::string_view to_string(VectorMode mode) noexcept {
  return mode == VectorMode::Count ? "count" : "binary";
}

inline VectorMode parse_vector_mode(std::string_view name) {
  if (name == "count") return VectorMode::Count;
  if (name == "binary") return VectorMode::Binary;
  throw Error(ErrorKind::ConfigInvalid, "unknown vector mode '" + std::string(name) + "'");
}

struct Entry {
  std::size_t index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Non-owning sparse vector. Entries are sorted by index, every value is
/// strictly positive and every index is below `dimension`; coordinates not
/// listed are zero.
struct SparseView {
  std::size_t dimension = 0;
  std::span<const Entry> entries;

  /// Same entries seen in a larger space (appended coordinates are zero).
  SparseView padded(std::size_t new_dimension) const {
    if (new_dimension < dimension) {
      throw Error(ErrorKind::DimensionShrink,
                  "cannot pad dimension " + std::to_string(dimension) + " down to " +
                      std::to_string(new_dimension));
    }
    return {new_dimension, entries};
  }

  bool is_zero() const noexcept { return entries.empty(); }
};

class SparseVector {
 public:
  SparseVector() = default;

  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}

  /// Entries may arrive in any order; zeros are dropped, duplicates and
  /// negative or out-of-range values are rejected.
  SparseVector(std::size_t dimension, std::vector<Entry> entries)
      : dimension_(dimension), entries_(std::move(entries)) {
    std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0; });
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.index >= dimension_) {
        throw Error(ErrorKind::DimensionMismatch, "entry index " + std::to_string(e.index) +
                                                      " outside dimension " +
                                                      std::to_string(dimension_));
      }
      if (!(e.value > 0.0) || !std::isfinite(e.value)) {
        throw Error(ErrorKind::ConfigInvalid, "sparse vector values must be finite and > 0");
      }
      if (i > 0 && entries_[i - 1].index == e.index) {
        throw Error(ErrorKind::ConfigInvalid,
                    "duplicate sparse index " + std::to_string(e.index));
      }
    }
  }

  static SparseVector from_dense(std::span<const double> dense) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (dense[i] != 0.0) entries.push_back({i, dense[i]});
    }
    return SparseVector(dense.size(), std::move(entries));
  }

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool is_zero() const noexcept { return entries_.empty(); }

  double at(std::size_t index) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                     [](const Entry& e, std::size_t i) { return e.index < i; });
    return it != entries_.end() && it->index == index ? it->value : 0.0;
  }

  std::vector<double> to_dense() const {
    std::vector<double> out(dimension_, 0.0);
    for (const auto& e : entries_) out[e.index] = e.value;
    return out;
  }

  SparseView view() const noexcept { return {dimension_, entries_}; }
  operator SparseView() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Entry> entries_;
};

/// Term list in lexicographic order plus the inverse index.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Takes terms in any order; duplicates collapse.
  explicit Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end());
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
  }

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& term(std::size_t i) const { return terms_.at(i); }

  std::optional<std::size_t> find(const std::string& term) const {
    const auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& term) const { return index_.count(term) != 0; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline Vocabulary build_vocabulary(std::span<const TokenList> corpus) {
  std::vector<std::string> terms;
  for (const auto& doc : corpus) terms.insert(terms.end(), doc.begin(), doc.end());
  if (terms.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus contains no tokens");
  return Vocabulary(std::move(terms));
}

/// Counts (or flags, in binary mode) in-vocabulary tokens. Out-of-vocabulary
/// tokens are ignored here; see `extend_query`.
inline SparseVector vectorize(const TokenList& tokens, const Vocabulary& vocab,
                              VectorMode mode = VectorMode::Count) {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) {
    if (const auto idx = vocab.find(t)) counts[*idx] += 1.0;
  }
  std::vector<Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [idx, count] : counts) {
    entries.push_back({idx, mode == VectorMode::Binary ? 1.0 : count});
  }
  return SparseVector(vocab.size(), std::move(entries));
}

struct OovTerm {
  std::string term;
  std::size_t count;

  friend bool operator==(const OovTerm&, const OovTerm&) = default;
};

/// A query vector living in the vocabulary space extended by one dimension
/// per distinct unknown term.
struct ExtendedQuery {
  SparseVector vector;
  std::vector<OovTerm> extra_dimensions;  // in first-occurrence order
  double penalty_factor = kDefaultPenaltyFactor;
};

/// Vectorizes a query against `vocab`. Each distinct out-of-vocabulary term
/// gets its own trailing dimension valued `count * penalty_factor`; in binary
/// mode the count of every term, known or not, is 1.
inline ExtendedQuery extend_query(const TokenList& tokens, const Vocabulary& vocab,
                                  double penalty_factor = kDefaultPenaltyFactor,
                                  VectorMode mode = VectorMode::Count) {
  if (!(penalty_factor > 0.0) || !std::isfinite(penalty_factor)) {
    throw Error(ErrorKind::ConfigInvalid, "penalty factor must be a finite positive number");
  }
  ExtendedQuery q;
  q.penalty_factor = penalty_factor;

  std::map<std::size_t, double> known;
  std::unordered_map<std::string, std::size_t> oov_slot;
  for (const auto& t : tokens) {
    if (const auto idx = vocab.find(t)) {
      known[*idx] += 1.0;
      continue;
    }
    const auto [it, inserted] = oov_slot.try_emplace(t, q.extra_dimensions.size());
    if (inserted) {
      q.extra_dimensions.push_back({t, 1});
    } else if (mode == VectorMode::Count) {
      ++q.extra_dimensions[it->second].count;
    }
  }

  std::vector<Entry> entries;
  entries.reserve(known.size() + q.extra_dimensions.size());
  for (const auto& [idx, count] : known) {
    entries.push_back({idx, mode == VectorMode::Binary ? 1.0 : count});
  }
  for (std::size_t j = 0; j < q.extra_dimensions.size(); ++j) {
    entries.push_back({vocab.size() + j,
                       static_cast<double>(q.extra_dimensions[j].count) * penalty_factor});
  }
  q.vector = SparseVector(vocab.size() + q.extra_dimensions.size(), std::move(entries));
  return q;
}

inline SparseVector pad_row(const SparseVector& row, std::size_t new_dimension) {
  const auto v = row.view().padded(new_dimension);
  return SparseVector(v.dimension, row.entries());
}

/// Corpus-wide term counts, most frequent first, ties in lexicographic order.
inline std::vector<std::pair<std::string, std::size_t>> term_frequencies(
    std::span<const TokenList> corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& t : doc) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace domsim
