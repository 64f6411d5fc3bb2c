#pragma once

// Accuracy of k-NN classification for a grid of metrics and k values,
// under leave-one-out or a seeded stratified split.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "domsim/error.hpp"
#include "domsim/kb_store.hpp"
#include "domsim/knn.hpp"
#include "domsim/metrics.hpp"
#include "domsim/parallel.hpp"

namespace domsim {

enum class Protocol { LeaveOneOut, Split };

constexpr std::string_view to_string(Protocol p) noexcept {
  return p == Protocol::LeaveOneOut ? "loo" : "split";
}

inline Protocol parse_protocol(std::string_view name) {
  if (name == "loo") return Protocol::LeaveOneOut;
  if (name == "split") return Protocol::Split;
  throw Error(ErrorKind::ConfigInvalid, "unknown protocol '" + std::string(name) + "'");
}

struct EvaluateOptions {
  std::vector<Metric> metrics = {Metric::Euclidean, Metric::Manhattan, Metric::Canberra,
                                 Metric::Cosine};
  std::vector<std::size_t> ks = {1, 2, 3};
  Protocol protocol = Protocol::LeaveOneOut;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  double penalty_factor = kDefaultPenaltyFactor;
  std::size_t workers = 1;
};

struct EvaluationCell {
  Metric metric;
  std::size_t k;
  std::size_t correct = 0;
  std::size_t total = 0;
  /// confusion[true class][predicted class]
  std::vector<std::vector<std::size_t>> confusion{};

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct EvaluationReport {
  Protocol protocol = Protocol::LeaveOneOut;
  std::uint64_t seed = 0;
  double split_ratio = 0.0;
  std::vector<std::string> categories;
  std::size_t documents = 0;  // evaluated documents
  std::size_t excluded = 0;   // documents that preprocess to nothing
  std::vector<Metric> metrics;
  std::vector<std::size_t> ks;
  std::vector<EvaluationCell> cells;  // row-major: k outer, metric inner

  const EvaluationCell& cell(Metric m, std::size_t k) const {
    for (const auto& c : cells) {
      if (c.metric == m && c.k == k) return c;
    }
    throw Error(ErrorKind::ConfigInvalid, "no evaluation cell for that metric and k");
  }
};

namespace detail {

struct HeldOutQuery {
  std::size_t true_label;
  std::vector<Neighbor> neighbors;  // max_k nearest, ascending
};

inline void tally(EvaluationReport& report, const std::vector<std::vector<HeldOutQuery>>& per_metric) {
  for (auto& cell : report.cells) {
    const auto m = static_cast<std::size_t>(
        std::find(report.metrics.begin(), report.metrics.end(), cell.metric) -
        report.metrics.begin());
    for (const auto& q : per_metric[m]) {
      const std::vector<Neighbor> top(q.neighbors.begin(),
                                      q.neighbors.begin() + static_cast<std::ptrdiff_t>(cell.k));
      const auto predicted = vote(top, report.categories.size());
      ++cell.total;
      if (predicted == q.true_label) ++cell.correct;
      ++cell.confusion[q.true_label][predicted];
    }
  }
}

inline void validate_options(const EvaluateOptions& opt) {
  if (opt.metrics.empty() || opt.ks.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "need at least one metric and one k");
  }
  for (const auto k : opt.ks) {
    if (k == 0) throw Error(ErrorKind::ConfigInvalid, "k must be at least 1");
  }
  if (!(opt.penalty_factor > 0.0) || !std::isfinite(opt.penalty_factor)) {
    throw Error(ErrorKind::ConfigInvalid, "penalty factor must be a finite positive number");
  }
  if (opt.protocol == Protocol::Split && !(opt.split_ratio > 0.0 && opt.split_ratio < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "split ratio must lie strictly between 0 and 1");
  }
}

}  // namespace detail

/// Leave-one-out on a built knowledge base: every row is classified against
/// all other rows. Terms occurring in no other row are treated as
/// out-of-vocabulary (penalized), exactly as if the knowledge base had been
/// rebuilt without the held-out document.
inline std::vector<std::vector<detail::HeldOutQuery>> leave_one_out_neighbors(
    const KnowledgeBase& kb, const std::vector<Metric>& metrics, std::size_t max_k,
    double penalty_factor, std::size_t workers) {
  std::vector<std::size_t> doc_freq(kb.vocabulary.size(), 0);
  for (const auto& row : kb.rows) {
    for (const auto& e : row.entries()) ++doc_freq[e.index];
  }
  std::vector<std::vector<detail::HeldOutQuery>> out(
      metrics.size(), std::vector<detail::HeldOutQuery>(kb.size()));

  parallel_for_chunks(kb.size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> cand;
    for (std::size_t i = begin; i < end; ++i) {
      auto entries = kb.rows[i].entries();
      for (auto& e : entries) {
        if (doc_freq[e.index] == 1) e.value *= penalty_factor;
      }
      const SparseVector q(kb.vocabulary.size(), std::move(entries));
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        cand.clear();
        for (std::size_t j = 0; j < kb.size(); ++j) {
          if (j == i) continue;
          cand.push_back({j, kb.labels[j], distance(metrics[m], q, kb.rows[j])});
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(max_k),
                          cand.end(), closer);
        out[m][i] = {kb.labels[i], {cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(max_k)}};
      }
    }
  });
  return out;
}

/// Runs the configured protocol. Documents are put in (category, text)
/// order first, so the report does not depend on corpus line order.
inline EvaluationReport evaluate(Corpus corpus, const BuildConfig& build,
                                 const EvaluateOptions& opt) {
  detail::validate_options(opt);
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no documents");
  std::stable_sort(corpus.begin(), corpus.end(), [](const auto& a, const auto& b) {
    return std::tie(a.category, a.text) < std::tie(b.category, b.text);
  });

  // Documents that preprocess to nothing cannot be classified under either protocol.
  Corpus usable;
  for (auto& d : corpus) {
    if (!build.pipeline(d.text).empty()) usable.push_back(std::move(d));
  }

  EvaluationReport report;
  report.protocol = opt.protocol;
  report.metrics = opt.metrics;
  report.ks = opt.ks;
  report.excluded = corpus.size() - usable.size();
  report.documents = 0;

  const auto max_k = *std::max_element(opt.ks.begin(), opt.ks.end());
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < usable.size(); ++i) by_class[usable[i].category].push_back(i);
  if (by_class.size() < 2) {
    throw Error(ErrorKind::ProtocolInfeasible, "evaluation needs at least two categories");
  }
  for (const auto& [name, docs] : by_class) {
    if (docs.size() < max_k + 1) {
      throw Error(ErrorKind::ProtocolInfeasible,
                  "category '" + name + "' has " + std::to_string(docs.size()) +
                      " usable documents, need at least " + std::to_string(max_k + 1));
    }
    report.categories.push_back(name);
  }
  const auto num_classes = report.categories.size();
  for (const auto k : opt.ks) {
    for (const auto m : opt.metrics) {
      EvaluationCell c{.metric = m, .k = k};
      c.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
      report.cells.push_back(std::move(c));
    }
  }

  std::vector<std::vector<detail::HeldOutQuery>> per_metric;
  if (opt.protocol == Protocol::LeaveOneOut) {
    const auto kb = build_kb(usable, build, opt.workers).kb;
    per_metric = leave_one_out_neighbors(kb, opt.metrics, max_k, opt.penalty_factor, opt.workers);
    report.documents = kb.size();
  } else {
    report.seed = opt.seed;
    report.split_ratio = opt.split_ratio;
    std::mt19937_64 rng(opt.seed);
    Corpus train;
    Corpus test;
    for (auto& [name, docs] : by_class) {
      std::shuffle(docs.begin(), docs.end(), rng);
      const auto n = docs.size();
      const auto n_train = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(opt.split_ratio * static_cast<double>(n))), 1,
          n - 1);
      std::sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(n_train));
      std::sort(docs.begin() + static_cast<std::ptrdiff_t>(n_train), docs.end());
      for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(usable[docs[i]]);
    }
    if (train.size() < max_k) {
      throw Error(ErrorKind::ProtocolInfeasible, "training portion smaller than the largest k");
    }
    const auto kb = build_kb(train, build, opt.workers).kb;
    per_metric.assign(opt.metrics.size(), std::vector<detail::HeldOutQuery>(test.size()));
    parallel_for_chunks(test.size(), opt.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const auto q = extend_query(build.pipeline(test[t].text), kb.vocabulary,
                                    opt.penalty_factor, kb.mode);
        const auto label = static_cast<std::size_t>(
            std::lower_bound(kb.categories.begin(), kb.categories.end(), test[t].category) -
            kb.categories.begin());
        for (std::size_t m = 0; m < opt.metrics.size(); ++m) {
          per_metric[m][t] = {label, query(kb, q.vector, opt.metrics[m], max_k)};
        }
      }
    });
    report.documents = test.size();
  }
  detail::tally(report, per_metric);
  return report;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json protocol = {{"name", std::string(to_string(r.protocol))}};
  if (r.protocol == Protocol::Split) {
    protocol["seed"] = r.seed;
    protocol["splitRatio"] = r.split_ratio;
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"metric", std::string(to_string(c.metric))},
                     {"k", c.k},
                     {"correct", c.correct},
                     {"total", c.total},
                     {"accuracy", c.accuracy()},
                     {"confusion", c.confusion}});
  }
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto m : r.metrics) metrics.push_back(std::string(to_string(m)));
  return {{"protocol", protocol},   {"categories", r.categories}, {"documents", r.documents},
          {"excluded", r.excluded}, {"metrics", metrics},         {"ks", r.ks},
          {"cells", cells}};
}

/// Aligned text table: one row per k ("1-NN", ...), one column per metric,
/// each cell "xx.xx% (correct/total)".
inline std::string format_table(const EvaluationReport& r) {
  auto title = [](Metric m) {
    std::string s(to_string(m));
    s.front() = static_cast<char>(s.front() - 'a' + 'A');
    return s;
  };
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Method"});
  for (const auto m : r.metrics) grid.back().push_back(title(m));
  for (const auto k : r.ks) {
    grid.push_back({std::to_string(k) + "-NN"});
    for (const auto m : r.metrics) {
      const auto& c = r.cell(m, k);
      std::ostringstream s;
      s << std::fixed << std::setprecision(2) << 100.0 * c.accuracy() << "% (" << c.correct << '/'
        << c.total << ')';
      grid.back().push_back(s.str());
    }
  }
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c + 1 == row.size()) {
        out << row[c];
      } else {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c] << "  ";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace domsim
