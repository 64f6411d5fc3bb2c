#pragma once

// Distances between equal-dimension, non-negative sparse vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "domsim/error.hpp"
#include "domsim/vectorspace.hpp"

namespace domsim {

enum class Metric { Cosine, Euclidean, Manhattan, Chebyshev, Canberra, Hamming };

inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::Cosine,    Metric::Euclidean,
                                                      Metric::Manhattan, Metric::Chebyshev,
                                                      Metric::Canberra,  Metric::Hamming};

constexpr std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Cosine: return "cosine";
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Chebyshev: return "chebyshev";
    case Metric::Canberra: return "canberra";
    case Metric::Hamming: return "hamming";
  }
  return "unknown";
}

inline Metric parse_metric(std::string_view name) {
  for (const auto m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown metric '" + std::string(name) + "'");
}

namespace detail {

inline void require_same_dimension(const SparseView& a, const SparseView& b) {
  if (a.dimension != b.dimension) {
    throw Error(ErrorKind::DimensionMismatch, "dimension " + std::to_string(a.dimension) +
                                                  " vs " + std::to_string(b.dimension));
  }
}

/// Calls `fn(a_i, b_i)` for every coordinate where at least one side is
/// non-zero, in ascending index order.
template <typename Fn>
void for_each_union(const SparseView& a, const SparseView& b, Fn&& fn) {
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->index < ib->index)) {
      fn(ia->value, 0.0);
      ++ia;
    } else if (ia == a.entries.end() || ib->index < ia->index) {
      fn(0.0, ib->value);
      ++ib;
    } else {
      fn(ia->value, ib->value);
      ++ia;
      ++ib;
    }
  }
}

inline double squared_norm(const SparseView& v) {
  double s = 0.0;
  for (const auto& e : v.entries) s += e.value * e.value;
  return s;
}

}  // namespace detail

/// 1 - cos(angle). Clamped to [0, 1], which is the exact range for
/// non-negative inputs.
inline double cosine_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  if (a.is_zero() || b.is_zero()) {
    throw Error(ErrorKind::ZeroVector, "cosine distance is undefined for a zero vector");
  }
  double dot = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      dot += ia->value * ib->value;
      ++ia;
      ++ib;
    }
  }
  // sqrt(|a|^2 |b|^2) rather than |a| |b| keeps d(x, x) exactly 0 for integer vectors.
  const double cos = dot / std::sqrt(detail::squared_norm(a) * detail::squared_norm(b));
  return std::clamp(1.0 - cos, 0.0, 1.0);
}

inline double euclidean_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  double s = 0.0;
  detail::for_each_union(a, b, [&](double x, double y) { s += (x - y) * (x - y); });
  return std::sqrt(s);
}

inline double manhattan_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  double s = 0.0;
  detail::for_each_union(a, b, [&](double x, double y) { s += std::abs(x - y); });
  return s;
}

inline double chebyshev_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  double m = 0.0;
  detail::for_each_union(a, b, [&](double x, double y) { m = std::max(m, std::abs(x - y)); });
  return m;
}

/// Sum of |a_i - b_i| / (|a_i| + |b_i|); coordinates where both are zero
/// contribute nothing.
inline double canberra_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  double s = 0.0;
  detail::for_each_union(a, b, [&](double x, double y) {
    s += std::abs(x - y) / (std::abs(x) + std::abs(y));
  });
  return s;
}

/// Number of coordinates whose values differ (exact comparison).
inline std::size_t hamming_distance(const SparseView& a, const SparseView& b) {
  detail::require_same_dimension(a, b);
  std::size_t n = 0;
  detail::for_each_union(a, b, [&](double x, double y) { n += (x != y) ? 1 : 0; });
  return n;
}

inline double distance(Metric m, const SparseView& a, const SparseView& b) {
  switch (m) {
    case Metric::Cosine: return cosine_distance(a, b);
    case Metric::Euclidean: return euclidean_distance(a, b);
    case Metric::Manhattan: return manhattan_distance(a, b);
    case Metric::Chebyshev: return chebyshev_distance(a, b);
    case Metric::Canberra: return canberra_distance(a, b);
    case Metric::Hamming: return static_cast<double>(hamming_distance(a, b));
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown metric");
}

}  // namespace domsim
