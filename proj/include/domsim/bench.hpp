#pragma once

// Query latency measurement against a loaded knowledge base.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "domsim/error.hpp"
#include "domsim/knn.hpp"

namespace domsim {

struct BenchReport {
  std::size_t kb_rows = 0;
  std::size_t queries = 0;
  std::size_t workers = 1;
  double min_ms = 0.0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

struct BenchRun {
  BenchReport report;
  std::vector<ClassificationResult> results;  // in query order
};

/// Text that preprocesses back to `row`: each term repeated by its count.
/// Lexicon lemmas map to themselves, so the row survives the pipeline
/// unless one of its terms is also a stopword.
inline std::string row_text(const KnowledgeBase& kb, std::size_t row) {
  std::string text;
  for (const auto& e : kb.rows.at(row).entries()) {
    const auto reps = std::max<long long>(1, std::llround(e.value));
    for (long long r = 0; r < reps; ++r) {
      if (!text.empty()) text += ' ';
      text += kb.vocabulary.term(e.index);
    }
  }
  return text;
}

/// Classifies `queries` knowledge-base texts sampled with a seeded RNG and
/// records the wall-clock latency of each full classification.
inline BenchRun run_bench(const KnowledgeBase& kb, const BuildConfig& build, std::size_t queries,
                          ClassifyConfig config, std::uint64_t seed = 42) {
  if (kb.empty()) throw Error(ErrorKind::EmptyKnowledgeBase, "knowledge base has no rows");
  if (queries == 0) throw Error(ErrorKind::ConfigInvalid, "need at least one query");
  config.validate();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kb.size() - 1);
  BenchRun run;
  std::vector<double> ms;
  ms.reserve(queries);
  for (std::size_t q = 0; q < queries; ++q) {
    const auto text = row_text(kb, pick(rng));
    const auto start = std::chrono::steady_clock::now();
    run.results.push_back(classify(kb, build, text, config));
    const auto stop = std::chrono::steady_clock::now();
    const auto elapsed = std::chrono::duration<double, std::milli>(stop - start).count();
    // steady_clock has nanosecond ticks here; keep the reported minimum positive.
    ms.push_back(std::max(elapsed, 1e-6));
  }

  std::sort(ms.begin(), ms.end());
  auto& r = run.report;
  r.kb_rows = kb.size();
  r.queries = queries;
  r.workers = config.workers;
  r.min_ms = ms.front();
  r.max_ms = ms.back();
  r.mean_ms = std::clamp(std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size()),
                         r.min_ms, r.max_ms);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size())));
  r.p95_ms = ms[std::max<std::size_t>(rank, 1) - 1];
  return run;
}

inline nlohmann::json to_json(const BenchReport& r) {
  return {{"kbRows", r.kb_rows}, {"queries", r.queries}, {"workers", r.workers},
          {"latencyMs", {{"min", r.min_ms}, {"mean", r.mean_ms}, {"p95", r.p95_ms}, {"max", r.max_ms}}}};
}

}  // namespace domsim
