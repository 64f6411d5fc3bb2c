#pragma once

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include <zlib.h>

#include "domsim/error.hpp"
#include "domsim/text_pipeline.hpp"
#include "domsim/vectorspace.hpp"

namespace domsim {

inline std::string crc32_hex(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

/// Everything that determines how raw text becomes a vector. Knowledge bases
/// remember the fingerprint of the configuration they were built with, and
/// queries prepared under a different one are refused.
struct BuildConfig {
  Pipeline pipeline;
  VectorMode mode = VectorMode::Count;

  std::string fingerprint() const {
    std::string desc = "domsim-pipeline/1\nmode:";
    desc += to_string(mode);
    desc += '\n';
    desc += pipeline.canonical_description();
    return crc32_hex(desc);
  }
};

/// The labeled matrix of domain phrases. Immutable once built or loaded.
struct KnowledgeBase {
  Vocabulary vocabulary;
  std::vector<SparseVector> rows;
  std::vector<std::size_t> labels;        // parallel to rows
  std::vector<std::string> categories;    // class id -> name, lexicographic
  std::string fingerprint;
  VectorMode mode = VectorMode::Count;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  std::size_t num_classes() const noexcept { return categories.size(); }

  /// Throws `kind` describing the first broken structural invariant.
  void validate(ErrorKind kind = ErrorKind::ConfigInvalid) const {
    auto fail = [&](const std::string& what) { throw Error(kind, "knowledge base: " + what); };
    if (rows.size() != labels.size()) fail("rows and labels differ in length");
    for (std::size_t c = 1; c < categories.size(); ++c) {
      if (!(categories[c - 1] < categories[c])) fail("categories not distinct and sorted");
    }
    for (const auto& c : categories) {
      if (c.empty()) fail("empty category name");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (labels[i] >= categories.size()) fail("label out of range at row " + std::to_string(i));
      if (rows[i].dimension() != vocabulary.size()) {
        fail("row " + std::to_string(i) + " dimension differs from vocabulary size");
      }
      if (rows[i].is_zero()) fail("row " + std::to_string(i) + " is a zero vector");
    }
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

}  // namespace domsim
