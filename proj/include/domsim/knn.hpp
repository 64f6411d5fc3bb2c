#pragma once

// Brute-force k-nearest-neighbor search over a knowledge base and the
// threshold-based domain membership decision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "domsim/error.hpp"
#include "domsim/knowledge_base.hpp"
#include "domsim/metrics.hpp"
#include "domsim/parallel.hpp"
#include "domsim/text_pipeline.hpp"
#include "domsim/vectorspace.hpp"

namespace domsim {

inline constexpr double kDefaultThreshold = 0.5;

struct Neighbor {
  std::size_t row_index;
  std::size_t label;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Strict weak order used everywhere neighbors are ranked: distance, then
/// knowledge-base row.
inline bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.row_index < b.row_index;
}

namespace detail {

inline void require_queryable(const KnowledgeBase& kb, const SparseView& q, std::size_t k) {
  if (kb.empty()) throw Error(ErrorKind::EmptyKnowledgeBase, "knowledge base has no rows");
  if (k == 0) throw Error(ErrorKind::ConfigInvalid, "k must be at least 1");
  if (k > kb.size()) {
    throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                          std::to_string(kb.size()) + " knowledge-base rows");
  }
  if (q.dimension < kb.vocabulary.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query dimension " + std::to_string(q.dimension) +
                    " is smaller than the vocabulary (" + std::to_string(kb.vocabulary.size()) +
                    ")");
  }
}

}  // namespace detail

/// Distance from `q` to every row, rows zero-padded to the query dimension.
inline std::vector<double> row_distances(const KnowledgeBase& kb, const SparseView& q, Metric metric,
                                         std::size_t workers = 1) {
  std::vector<double> out(kb.size());
  parallel_for_chunks(kb.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = distance(metric, q, kb.rows[i].view().padded(q.dimension));
    }
  });
  return out;
}

/// The k closest rows in ascending (distance, row) order. Each row distance
/// is computed independently, so the answer does not depend on `workers`.
inline std::vector<Neighbor> query(const KnowledgeBase& kb, const SparseView& q, Metric metric,
                                   std::size_t k, std::size_t workers = 1) {
  detail::require_queryable(kb, q, k);
  if (metric == Metric::Cosine && q.is_zero()) {
    throw Error(ErrorKind::ZeroVector, "cannot rank by cosine distance with a zero query");
  }
  const auto dist = row_distances(kb, q, metric, workers);
  std::vector<Neighbor> all;
  all.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) all.push_back({i, kb.labels[i], dist[i]});
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return all;
}

/// Majority label among `neighbors` (ordered nearest first). A tie goes to
/// whichever tied label appears first in the list, so k = 1 is plain
/// nearest-neighbor.
inline std::size_t vote(const std::vector<Neighbor>& neighbors, std::size_t num_classes) {
  if (neighbors.empty()) throw Error(ErrorKind::ConfigInvalid, "cannot vote without neighbors");
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& n : neighbors) {
    if (n.label >= num_classes) {
      throw Error(ErrorKind::ConfigInvalid, "neighbor label out of range");
    }
    ++counts[n.label];
  }
  const auto best = *std::max_element(counts.begin(), counts.end());
  for (const auto& n : neighbors) {
    if (counts[n.label] == best) return n.label;
  }
  return neighbors.front().label;  // unreachable
}

struct ClassifyConfig {
  Metric metric = Metric::Cosine;
  std::size_t k = 1;
  double threshold = kDefaultThreshold;
  double penalty_factor = kDefaultPenaltyFactor;
  std::size_t workers = 1;

  void validate() const {
    if (k == 0) throw Error(ErrorKind::ConfigInvalid, "k must be at least 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw Error(ErrorKind::ConfigInvalid, "threshold must lie in [0, 1]");
    }
    if (!(penalty_factor > 0.0) || !std::isfinite(penalty_factor)) {
      throw Error(ErrorKind::ConfigInvalid, "penalty factor must be a finite positive number");
    }
    if (workers == 0) throw Error(ErrorKind::ConfigInvalid, "workers must be at least 1");
  }
};

struct ClassificationResult {
  /// 1 - min cosine distance; only set when ranking by cosine.
  std::optional<double> similarity_value;
  /// Winning class id; empty when the query preprocesses to nothing.
  std::optional<std::size_t> label;
  std::vector<double> knn_result;  // one-hot over classes, all zero if unclassifiable
  bool in_domain = false;
  std::vector<Neighbor> neighbors;
  Metric metric = Metric::Cosine;
  std::size_t k = 1;
  /// Smallest distance under `metric`.
  std::optional<double> min_distance;
  /// Smallest cosine distance; the in-domain test always uses this one.
  std::optional<double> cosine_min_distance;
  std::vector<OovTerm> oov_terms;

  bool classifiable() const noexcept { return label.has_value(); }
};

/// Classifies already-preprocessed tokens. Tokens outside the vocabulary
/// extend the query space with penalized dimensions.
inline ClassificationResult classify_tokens(const KnowledgeBase& kb, const TokenList& tokens,
                                            const ClassifyConfig& config) {
  config.validate();
  if (kb.empty()) throw Error(ErrorKind::EmptyKnowledgeBase, "knowledge base has no rows");

  ClassificationResult result;
  result.metric = config.metric;
  result.k = config.k;
  result.knn_result.assign(kb.num_classes(), 0.0);

  const auto q = extend_query(tokens, kb.vocabulary, config.penalty_factor, kb.mode);
  result.oov_terms = q.extra_dimensions;
  if (q.vector.is_zero()) {
    result.similarity_value = 0.0;
    return result;
  }

  result.neighbors = query(kb, q.vector, config.metric, config.k, config.workers);
  const auto label = vote(result.neighbors, kb.num_classes());
  result.label = label;
  result.knn_result[label] = 1.0;
  result.min_distance = result.neighbors.front().distance;

  double cos_min = 0.0;
  if (config.metric == Metric::Cosine) {
    cos_min = *result.min_distance;
    result.similarity_value = 1.0 - cos_min;
  } else {
    const auto d = row_distances(kb, q.vector, Metric::Cosine, config.workers);
    cos_min = *std::min_element(d.begin(), d.end());
  }
  result.cosine_min_distance = cos_min;
  result.in_domain = cos_min <= config.threshold;
  return result;
}

/// Full text path. `build` must be the configuration the knowledge base was
/// built with (checked by fingerprint).
inline ClassificationResult classify(const KnowledgeBase& kb, const BuildConfig& build,
                                     std::string_view text, const ClassifyConfig& config = {}) {
  if (build.fingerprint() != kb.fingerprint || build.mode != kb.mode) {
    throw Error(ErrorKind::FingerprintMismatch,
                "pipeline fingerprint " + build.fingerprint() +
                    " does not match the knowledge base (" + kb.fingerprint + ")");
  }
  return classify_tokens(kb, build.pipeline(text), config);
}

/// JSON object for one classification. `similarityValue` and `knnResult`
/// are always present; unset optionals serialize as null.
inline nlohmann::json to_json(const ClassificationResult& r, const KnowledgeBase& kb) {
  auto opt = [](const auto& o) -> nlohmann::json {
    return o ? nlohmann::json(*o) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["similarityValue"] = opt(r.similarity_value);
  j["knnResult"] = r.knn_result;
  j["label"] = opt(r.label);
  j["category"] = r.label ? nlohmann::json(kb.categories.at(*r.label)) : nlohmann::json(nullptr);
  j["inDomain"] = r.in_domain;
  j["metric"] = std::string(to_string(r.metric));
  j["k"] = r.k;
  j["minDistance"] = opt(r.min_distance);
  j["cosineMinDistance"] = opt(r.cosine_min_distance);
  return j;
}

/// Square matrix of pairwise row distances.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline DistanceMatrix pairwise_distance_matrix(const KnowledgeBase& kb, Metric metric,
                                               std::size_t workers = 1) {
  if (kb.empty()) throw Error(ErrorKind::EmptyKnowledgeBase, "knowledge base has no rows");
  const auto n = kb.size();
  DistanceMatrix m(n);
  parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        m(i, j) = distance(metric, kb.rows[i], kb.rows[j]);
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  }
  if (metric == Metric::Cosine) {
    for (const auto& r : kb.rows) {
      if (r.is_zero()) throw Error(ErrorKind::ZeroVector, "knowledge base contains a zero row");
    }
  }
  return m;
}

}  // namespace domsim
