// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "domsim/domsim.hpp"
#include "support/oracles.hpp"
#include "support/process.hpp"

namespace {

using namespace domsim;
using testing::Dense;

constexpr double kTol = 1e-12;
constexpr double kScaleTol = 1e-9;
constexpr double kAxiomBudgetS = 5.0;
constexpr double kOracleBudgetS = 10.0;
constexpr double kQueryBudgetMs = 2000.0;
constexpr double kMeanQueryMs = 50.0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string name(Metric m) { return std::string(to_string(m)); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Outcome metric_axioms() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const bool integers = trial % 2 == 0;
    const std::size_t dim = 1 + trial % 40;
    const auto a = testing::random_dense(rng, dim, 0.4, integers);
    const auto b = testing::random_dense(rng, dim, 0.4, integers);
    const auto c = testing::random_dense(rng, dim, 0.4, integers);
    const auto sa = SparseVector::from_dense(a);
    const auto sb = SparseVector::from_dense(b);
    const auto sc = SparseVector::from_dense(c);
    for (const auto m : kAllMetrics) {
      const double ab = distance(m, sa, sb);
      const double ba = distance(m, sb, sa);
      const double aa = distance(m, sa, sa);
      o.check(ab >= 0.0, name(m) + " negative");
      o.check(ab == ba, name(m) + " asymmetric: " + fmt(ab) + " vs " + fmt(ba));
      o.check(integers ? aa == 0.0 : aa <= kTol, name(m) + " d(x,x)=" + fmt(aa));
      o.check(std::abs(ab - testing::dense_distance(m, a, b)) <= kTol * std::max(1.0, ab),
              name(m) + " disagrees with dense reference");
      if (m == Metric::Cosine) {
        o.check(ab <= 1.0 + kTol, "cosine above 1: " + fmt(ab));
        const double scaled = distance(m, SparseVector::from_dense([&] {
                                          auto s = a;
                                          for (auto& x : s) x *= 7.25;
                                          return s;
                                        }()),
                                        sb);
        o.check(std::abs(scaled - ab) <= kScaleTol, "cosine not scale invariant");
      } else if (m != Metric::Canberra) {
        const double ac = distance(m, sa, sc);
        const double cb = distance(m, sc, sb);
        o.check(ab <= ac + cb + kTol * std::max(1.0, ab), name(m) + " violates triangle inequality");
      }
    }
    ++pairs;
  }
  const double elapsed = seconds_since(t0);
  o.check(elapsed < kAxiomBudgetS, "took " + fmt(elapsed) + " s");
  if (o.ok) o.detail = std::to_string(pairs) + " triples, " + fmt(elapsed) + " s";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> rows_d(5, 200), dim_d(2, 50), classes_d(2, 5);
    const auto n = rows_d(rng);
    const auto dim = dim_d(rng);
    const auto classes = classes_d(rng);
    const bool integers = trial % 3 != 0;
    std::vector<Dense> rows;
    std::vector<std::size_t> labels;
    std::uniform_int_distribution<std::size_t> label_d(0, classes - 1);
    for (std::size_t i = 0; i < n; ++i) {
      // Duplicate rows now and then so distance ties actually occur.
      if (i > 0 && rng() % 5 == 0) {
        rows.push_back(rows[rng() % rows.size()]);
      } else {
        rows.push_back(testing::random_dense(rng, dim, 0.3, integers));
      }
      labels.push_back(label_d(rng));
    }
    const auto kb = testing::kb_from_rows(rows, labels, classes);
    const auto q = SparseVector::from_dense(testing::random_dense(rng, dim + trial % 3, 0.3, integers));
    for (const auto m : kAllMetrics) {
      for (std::size_t k = 1; k <= 5; ++k) {
        const auto want = testing::naive_knn(kb, q, m, k);
        for (const std::size_t workers : {1u, 4u}) {
          const auto got = query(kb, q, m, k, workers);
          o.check(got == want, "trial " + std::to_string(trial) + " " + name(m) + " k=" +
                                   std::to_string(k) + " workers=" + std::to_string(workers));
        }
        for (const auto& nb : want) {
          const auto ref = testing::dense_distance(m, testing::padded(rows[nb.row_index], q.dimension()),
                                                   q.to_dense());
          o.check(std::abs(nb.distance - ref) <= kTol * std::max(1.0, ref), "distance vs dense reference");
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  o.check(elapsed < kOracleBudgetS, "took " + fmt(elapsed) + " s");
  if (o.ok) o.detail = "50 knowledge bases, " + fmt(elapsed) + " s";
  return o;
}

Outcome oov_mechanism() {
  Outcome o;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Dense> rows;
    std::vector<std::size_t> labels;
    for (int i = 0; i < 20; ++i) {
      rows.push_back(testing::random_dense(rng, 12, 0.4, trial % 2 == 0));
      labels.push_back(static_cast<std::size_t>(i % 3));
    }
    const auto kb = testing::kb_from_rows(rows, labels, 3);
    const TokenList unknown{"zzz", "yyy", "zzz"};
    const auto r = classify_tokens(kb, unknown, {});
    o.check(r.min_distance && std::abs(*r.min_distance - 1.0) <= kTol, "OOV distance " + fmt(*r.min_distance));
    o.check(r.similarity_value && *r.similarity_value == 0.0, "OOV similarity not 0");
    o.check(!r.in_domain, "OOV query marked in-domain");

    const auto ext = extend_query(unknown, kb.vocabulary);
    o.check(ext.vector.at(12) == 2 * kDefaultPenaltyFactor && ext.vector.at(13) == kDefaultPenaltyFactor,
            "OOV values are not count x penalty");

    for (const auto m : kAllMetrics) {
      for (std::size_t i = 0; i + 1 < kb.size(); i += 3) {
        const double before = distance(m, kb.rows[i], kb.rows[i + 1]);
        const double after = distance(m, pad_row(kb.rows[i], 40), pad_row(kb.rows[i + 1], 40));
        o.check(std::abs(before - after) <= kTol, name(m) + " changed under padding");
      }
    }
  }
  if (o.ok) o.detail = "30 knowledge bases";
  return o;
}

Outcome length_robustness() {
  Outcome o;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = testing::random_dense(rng, 20, 0.3, true);
    auto y = x;
    for (auto& v : y) v *= 3;
    const auto sx = SparseVector::from_dense(x);
    const auto sy = SparseVector::from_dense(y);
    o.check(cosine_distance(sx, sy) <= kScaleTol, "cosine(x,3x) = " + fmt(cosine_distance(sx, sy)));
    double sq = 0;
    for (const double v : x) sq += v * v;
    const double norm = std::sqrt(sq);
    o.check(euclidean_distance(sx, sy) == 2 * norm, "euclidean(x,3x) != 2|x|");
  }

  // Three-document knowledge base: cosine prefers the repeated document,
  // Euclidean prefers the short partial match.
  const Corpus corpus{{"telco", "adsl fibra adsl fibra adsl fibra"},
                      {"mixed", "adsl pizza"},
                      {"food", "pizza pizza"}};
  const auto kb = build_kb(corpus, {}).kb;
  const auto tokens = tokenize("adsl fibra");
  ClassifyConfig cos;
  ClassifyConfig euc;
  euc.metric = Metric::Euclidean;
  const auto rc = classify_tokens(kb, tokens, cos);
  const auto re = classify_tokens(kb, tokens, euc);
  o.check(kb.categories[*rc.label] == "telco", "cosine 1-NN is " + kb.categories[*rc.label]);
  o.check(kb.categories[*re.label] == "mixed", "euclidean 1-NN is " + kb.categories[*re.label]);

  const Dense q = {1, 1, 0};  // adsl fibra pizza
  const std::vector<Dense> rows = {{3, 3, 0}, {1, 0, 1}, {0, 0, 2}};
  auto brute = [&](auto&& d) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (d(q, rows[i]) < d(q, rows[best])) best = i;
    return best;
  };
  o.check(brute(testing::dense_cosine) == 0, "brute-force cosine disagrees");
  o.check(brute(testing::dense_euclidean) == 1, "brute-force euclidean disagrees");
  o.check(kb.rows[rc.neighbors[0].row_index].to_dense() == rows[0], "cosine neighbor row mismatch");
  o.check(kb.rows[re.neighbors[0].row_index].to_dense() == rows[1], "euclidean neighbor row mismatch");
  if (o.ok) o.detail = "cosine -> telco, euclidean -> mixed";
  return o;
}

Outcome separable_corpus() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto corpus = testing::synthetic_corpus({});
  EvaluateOptions opt;
  opt.metrics = {kAllMetrics.begin(), kAllMetrics.end()};
  opt.ks = {1};
  opt.workers = 8;
  const auto report = evaluate(corpus, {}, opt);
  o.check(report.documents == 3000, "documents " + std::to_string(report.documents));
  for (const auto m : kAllMetrics) {
    const auto& cell = report.cell(m, 1);
    o.check(cell.accuracy() == 1.0, name(m) + " accuracy " + fmt(cell.accuracy()));
  }
  if (o.ok) o.detail = "10x300, six metrics, " + fmt(seconds_since(t0)) + " s";
  return o;
}

Outcome overlapping_corpus_report() {
  Outcome o;
  const auto corpus = testing::synthetic_corpus({.categories = 10,
                                                 .phrases_per_category = 60,
                                                 .topic_repeats = 1,
                                                 .overlap = 0.6,
                                                 .seed = 7,
                                                 .length_jitter = 6});
  EvaluateOptions opt;
  opt.workers = 4;
  const auto report = evaluate(corpus, {}, opt);
  for (const auto& c : report.cells) {
    o.check(c.accuracy() >= 0.0 && c.accuracy() <= 1.0, "accuracy out of range");
    o.check(c.total == 600, "cell total " + std::to_string(c.total));
  }
  const auto table = format_table(report);
  std::istringstream lines(table);
  std::string header;
  std::getline(lines, header);
  o.check(header.rfind("Method", 0) == 0 && header.find("Euclidean") < header.find("Manhattan") &&
              header.find("Manhattan") < header.find("Canberra") && header.find("Canberra") < header.find("Cosine"),
          "header: " + header);
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line); ++rows) {
    o.check(line.rfind(std::to_string(rows + 1) + "-NN", 0) == 0, "row label: " + line);
  }
  o.check(rows == 3, "row count " + std::to_string(rows));
  if (o.ok) {
    o.detail = "3x4 grid, cosine 1-NN " + fmt(report.cell(Metric::Cosine, 1).accuracy());
    std::fputs(table.c_str(), stdout);
  }
  return o;
}

Outcome performance() {
  Outcome o;
  const auto kb = build_kb(testing::synthetic_corpus({.overlap = 0.3}), {}).kb;
  o.check(kb.size() == 3000, "kb rows " + std::to_string(kb.size()));
  ClassifyConfig cfg;
  cfg.workers = 8;
  const auto run = run_bench(kb, {}, 100, cfg);
  o.check(run.report.max_ms < kQueryBudgetMs, "slowest query " + fmt(run.report.max_ms) + " ms");
  o.check(run.report.mean_ms <= kMeanQueryMs, "mean " + fmt(run.report.mean_ms) + " ms");
  for (const std::size_t workers : {1u, 2u, 3u}) {
    cfg.workers = workers;
    const auto other = run_bench(kb, {}, 100, cfg);
    for (std::size_t i = 0; i < other.results.size(); ++i) {
      o.check(other.results[i].neighbors == run.results[i].neighbors &&
                  to_json(other.results[i], kb) == to_json(run.results[i], kb),
              "results differ at workers=" + std::to_string(workers));
    }
  }
  if (o.ok) {
    o.detail = "mean " + fmt(run.report.mean_ms) + " ms, p95 " + fmt(run.report.p95_ms) + " ms, max " +
               fmt(run.report.max_ms) + " ms";
  }
  return o;
}

Outcome json_contract() {
  Outcome o;
  const std::string fixtures = DOMSIM_FIXTURES;
  const std::string resources = DOMSIM_RESOURCES;
  const auto kb_path = (std::filesystem::temp_directory_path() /
                        ("domsim_accept_" + std::to_string(::getpid()) + ".json"))
                           .string();
  const std::vector<std::string> pipeline{"--stopwords", resources + "/stopwords_it.txt", "--lemmas",
                                          resources + "/lemmas_it.tsv"};
  auto build_args = std::vector<std::string>{"build", fixtures + "/corpus.jsonl", kb_path};
  build_args.insert(build_args.end(), pipeline.begin(), pipeline.end());
  const auto b = testing::run_cli(build_args);
  o.check(b.exit_code == 0, "build failed: " + b.err);
  for (const std::string k : {"1", "3"}) {
    auto args = std::vector<std::string>{"classify", kb_path, "--k", k};
    args.insert(args.end(), pipeline.begin(), pipeline.end());
    const auto r = testing::run_cli(args, fixtures + "/queries.txt");
    o.check(r.exit_code == 0, "classify failed: " + r.err);
    const auto got = r.json_lines();
    const auto want = testing::read_json_lines(fixtures + "/classify_golden_k" + k + ".jsonl");
    o.check(got.size() == want.size(), "line count");
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
      std::string why;
      o.check(testing::json_near(got[i], want[i], kTol, &why), "k=" + k + " line " + std::to_string(i) + ": " + why);
      const auto& knn = got[i]["knnResult"];
      double sum = 0;
      for (const auto& v : knn) sum += v.get<double>();
      o.check(knn.size() == 3, "knnResult length");
      o.check(got[i]["label"].is_null() ? sum == 0.0 : sum == 1.0 && knn[got[i]["label"].get<std::size_t>()] == 1.0,
              "knnResult not one-hot");
      const auto& sim = got[i]["similarityValue"];
      o.check(sim.get<double>() >= 0.0 && sim.get<double>() <= 1.0, "similarity out of range");
    }
  }
  std::filesystem::remove(kb_path);
  if (o.ok) o.detail = "golden output matched for k=1 and k=3";
  return o;
}

Outcome persistence() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto corpus = testing::synthetic_corpus({.categories = 2 + seed % 4,
                                                   .phrases_per_category = 5 + seed,
                                                   .topic_repeats = 1 + seed % 3,
                                                   .overlap = 0.1 * static_cast<double>(seed % 10),
                                                   .seed = seed});
    BuildConfig build;
    build.mode = seed % 2 ? VectorMode::Binary : VectorMode::Count;
    const auto kb = build_kb(corpus, build).kb;
    const auto bytes = serialize_kb(kb);
    const auto back = deserialize_kb(bytes);
    o.check(back == kb, "round trip differs for seed " + std::to_string(seed));
    o.check(serialize_kb(back) == bytes, "re-serialization differs for seed " + std::to_string(seed));
  }
  const auto kb = build_kb({{"a", "gatto"}, {"b", "cane"}}, {}).kb;
  const auto bytes = serialize_kb(kb);
  auto kind_of = [](const std::string& s) {
    try {
      deserialize_kb(s);
    } catch (const Error& e) {
      return std::string(to_string(e.kind()));
    }
    return std::string("accepted");
  };
  o.check(kind_of(bytes.substr(0, bytes.size() / 2)) == "CorruptFile", "truncated file accepted");
  auto tampered = nlohmann::json::parse(bytes);
  tampered["payload"]["labels"][0] = 1;
  o.check(kind_of(tampered.dump()) == "CorruptFile", "tampered file accepted");
  auto future = nlohmann::json::parse(bytes);
  future["kbFormat"] = kKbFormatVersion + 1;
  o.check(kind_of(future.dump()) == "FormatVersionMismatch", "future version accepted");
  if (o.ok) o.detail = "20 round trips, corrupt and future-version files rejected";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric axioms", metric_axioms},
      {"k-NN equals brute-force oracle", oracle_equivalence},
      {"out-of-vocabulary penalty", oov_mechanism},
      {"length robustness", length_robustness},
      {"separable corpus 1-NN accuracy", separable_corpus},
      {"overlapping corpus report", overlapping_corpus_report},
      {"query latency and determinism", performance},
      {"classify JSON contract", json_contract},
      {"knowledge base persistence", persistence},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
