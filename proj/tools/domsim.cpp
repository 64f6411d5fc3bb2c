// domsim: build knowledge bases, classify sentences, evaluate and benchmark.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "domsim/domsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct PipelineFlags {
  std::string stopwords;
  std::string lemmas;
  std::optional<std::string> mode;

  void attach(CLI::App* cmd) {
    cmd->add_option("--stopwords", stopwords, "Stopword file (one term per line)");
    cmd->add_option("--lemmas", lemmas, "Lemma lexicon (inflected<TAB>lemma per line)");
    cmd->add_option("--mode", mode, "Vector mode")->check(CLI::IsMember({"count", "binary"}));
  }

  domsim::BuildConfig config(domsim::VectorMode fallback = domsim::VectorMode::Count) const {
    domsim::BuildConfig c;
    if (!stopwords.empty()) c.pipeline.stopwords = domsim::StopwordList::load(stopwords);
    if (!lemmas.empty()) c.pipeline.lemmas = domsim::LemmaLexicon::load(lemmas);
    c.mode = mode ? domsim::parse_vector_mode(*mode) : fallback;
    return c;
  }
};

struct QueryFlags {
  std::string metric = "cosine";
  std::size_t k = 1;
  double threshold = domsim::kDefaultThreshold;
  double penalty = domsim::kDefaultPenaltyFactor;
  std::size_t workers = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "Ranking metric")->capture_default_str();
    cmd->add_option("--k", k, "Number of neighbors")->capture_default_str();
    cmd->add_option("--threshold", threshold, "Cosine distance membership threshold")
        ->capture_default_str();
    cmd->add_option("--penalty", penalty, "Out-of-vocabulary penalty factor")
        ->capture_default_str();
    cmd->add_option("--workers", workers, "Parallel workers per query")->capture_default_str();
  }

  domsim::ClassifyConfig config() const {
    domsim::ClassifyConfig c;
    c.metric = domsim::parse_metric(metric);
    c.k = k;
    c.threshold = threshold;
    c.penalty_factor = penalty;
    c.workers = workers;
    c.validate();
    return c;
  }
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

int cmd_build(const std::string& corpus_path, const std::string& out_path,
              const PipelineFlags& pipeline, std::size_t workers) {
  const auto config = pipeline.config();
  const auto corpus = domsim::read_corpus(corpus_path);
  const auto built = domsim::build_kb(corpus, config, workers);
  domsim::save_kb(built.kb, out_path);
  for (const auto pos : built.dropped) {
    std::cerr << "warning: document " << pos << " is empty after preprocessing; skipped\n";
  }
  std::cout << nlohmann::json{{"rows", built.kb.size()},
                              {"classes", built.kb.num_classes()},
                              {"vocabularySize", built.kb.vocabulary.size()},
                              {"categories", built.kb.categories},
                              {"dropped", built.dropped},
                              {"fingerprint", built.kb.fingerprint},
                              {"mode", std::string(domsim::to_string(built.kb.mode))}}
                   .dump()
            << '\n';
  return kExitOk;
}

int cmd_classify(const std::string& kb_path, const std::vector<std::string>& text,
                 const PipelineFlags& pipeline, const QueryFlags& query) {
  const auto kb = domsim::load_kb(kb_path);
  const auto build = pipeline.config(kb.mode);
  const auto config = query.config();
  if (build.fingerprint() != kb.fingerprint) {
    throw domsim::Error(domsim::ErrorKind::FingerprintMismatch,
                        "preprocessing flags do not match the pipeline the knowledge base was "
                        "built with (fingerprint " +
                            build.fingerprint() + " vs " + kb.fingerprint + ")");
  }
  auto emit = [&](const std::string& line) {
    std::cout << domsim::to_json(domsim::classify(kb, build, line, config), kb).dump() << '\n';
  };
  if (!text.empty()) {
    std::string joined;
    for (const auto& t : text) joined += (joined.empty() ? "" : " ") + t;
    emit(joined);
  } else {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      emit(line);
    }
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& corpus_path, const PipelineFlags& pipeline,
                 domsim::EvaluateOptions options, const std::string& metrics,
                 const std::string& ks) {
  options.metrics.clear();
  for (const auto& m : split_csv(metrics)) options.metrics.push_back(domsim::parse_metric(m));
  options.ks.clear();
  for (const auto& k : split_csv(ks)) {
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(k, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != k.size()) {
      throw domsim::Error(domsim::ErrorKind::ConfigInvalid, "bad k value '" + k + "'");
    }
    options.ks.push_back(value);
  }
  const auto report =
      domsim::evaluate(domsim::read_corpus(corpus_path), pipeline.config(), options);
  std::cout << domsim::to_json(report).dump() << '\n';
  std::cerr << domsim::format_table(report);
  return kExitOk;
}

int cmd_bench(const std::string& kb_path, const PipelineFlags& pipeline, const QueryFlags& query,
              std::size_t queries, std::uint64_t seed) {
  const auto kb = domsim::load_kb(kb_path);
  const auto run = domsim::run_bench(kb, pipeline.config(kb.mode), queries, query.config(), seed);
  std::cout << domsim::to_json(run.report).dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence domain classification by k-nearest-neighbor cosine search"};
  app.require_subcommand(1);

  std::size_t build_workers = 1;
  std::string corpus_path;
  std::string out_path;
  std::string kb_path;
  std::vector<std::string> text;
  PipelineFlags pipeline;
  QueryFlags query;

  auto* build = app.add_subcommand("build", "Build a knowledge base from a labeled corpus");
  build->add_option("corpus", corpus_path, "Corpus (.jsonl or .csv)")->required();
  build->add_option("out", out_path, "Output knowledge-base file")->required();
  build->add_option("--workers", build_workers, "Parallel preprocessing workers");
  pipeline.attach(build);

  auto* classify = app.add_subcommand("classify", "Classify text (arguments or stdin lines)");
  classify->add_option("kb", kb_path, "Knowledge-base file")->required();
  classify->add_option("text", text, "Text to classify; reads stdin lines when absent");
  pipeline.attach(classify);
  query.attach(classify);

  domsim::EvaluateOptions eval;
  std::string metrics = "euclidean,manhattan,canberra,cosine";
  std::string ks = "1,2,3";
  std::string protocol = "loo";
  std::optional<std::uint64_t> seed;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy grid over metrics and k");
  evaluate->add_option("corpus", corpus_path, "Corpus (.jsonl or .csv)")->required();
  evaluate->add_option("--metrics", metrics, "Comma-separated metrics")->capture_default_str();
  evaluate->add_option("--ks", ks, "Comma-separated k values")->capture_default_str();
  evaluate->add_option("--protocol", protocol, "loo or split")
      ->check(CLI::IsMember({"loo", "split"}))
      ->capture_default_str();
  evaluate->add_option("--seed", seed, "Shuffle seed (required for split)");
  evaluate->add_option("--split-ratio", eval.split_ratio, "Training fraction per category")
      ->capture_default_str();
  evaluate->add_option("--penalty", eval.penalty_factor, "Out-of-vocabulary penalty factor")
      ->capture_default_str();
  evaluate->add_option("--workers", eval.workers, "Parallel workers")->capture_default_str();
  pipeline.attach(evaluate);

  std::size_t queries = 100;
  std::uint64_t bench_seed = 42;
  auto* bench = app.add_subcommand("bench", "Measure classification latency");
  bench->add_option("kb", kb_path, "Knowledge-base file")->required();
  bench->add_option("--queries", queries, "Number of sampled queries")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Sampling seed")->capture_default_str();
  pipeline.attach(bench);
  query.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*build) return cmd_build(corpus_path, out_path, pipeline, build_workers);
    if (*classify) return cmd_classify(kb_path, text, pipeline, query);
    if (*evaluate) {
      eval.protocol = domsim::parse_protocol(protocol);
      if (eval.protocol == domsim::Protocol::Split) {
        if (!seed) {
          std::cerr << "evaluate: --seed is required with --protocol split\n";
          return kExitUsage;
        }
        eval.seed = *seed;
      }
      return cmd_evaluate(corpus_path, pipeline, eval, metrics, ks);
    }
    if (*bench) return cmd_bench(kb_path, pipeline, query, queries, bench_seed);
  } catch (const domsim::Error& e) {
    print_error(std::string(domsim::to_string(e.kind())), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return kExitError;
  }
  return kExitUsage;
}
