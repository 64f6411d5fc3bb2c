#pragma once

// Corpus ingestion, knowledge-base construction and the versioned KB file.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "domsim/error.hpp"
#include "domsim/knowledge_base.hpp"
#include "domsim/parallel.hpp"
#include "domsim/text_pipeline.hpp"
#include "domsim/vectorspace.hpp"

namespace domsim {

inline constexpr int kKbFormatVersion = 1;

struct CorpusDocument {
  std::string category;
  std::string text;

  friend bool operator==(const CorpusDocument&, const CorpusDocument&) = default;
};

using Corpus = std::vector<CorpusDocument>;

// ---------------------------------------------------------------------------
// Corpus readers

/// JSON Lines: one `{"category": ..., "text": ...}` object per line.
inline Corpus read_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto where = "corpus line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptFile, where + e.what());
    }
    if (!j.is_object() || !j.contains("category") || !j.contains("text") ||
        !j["category"].is_string() || !j["text"].is_string()) {
      throw Error(ErrorKind::CorruptFile, where + "expected string fields 'category' and 'text'");
    }
    corpus.push_back({j["category"].get<std::string>(), j["text"].get<std::string>()});
  }
  return corpus;
}

namespace detail {

/// RFC 4180 records: quoted fields may hold commas, newlines and "" escapes.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',': record.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        any = false;
        break;
      default: field += c; any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::CorruptFile, "csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace detail

/// CSV with the header `category,text`.
inline Corpus read_corpus_csv(std::istream& in) {
  const auto records = detail::parse_csv(in);
  if (records.empty() || records.front() != std::vector<std::string>{"category", "text"}) {
    throw Error(ErrorKind::CorruptFile, "csv corpus must start with the header 'category,text'");
  }
  Corpus corpus;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != 2) {
      throw Error(ErrorKind::CorruptFile,
                  "csv record " + std::to_string(r + 1) + ": expected 2 fields");
    }
    corpus.push_back({records[r][0], records[r][1]});
  }
  return corpus;
}

/// Reads `.csv` files as CSV and anything else as JSON Lines.
inline Corpus read_corpus(const std::string& path) {
  auto in = detail::open_input(path);
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? read_corpus_csv(in) : read_corpus_jsonl(in);
}

// ---------------------------------------------------------------------------
// Build

struct BuildResult {
  KnowledgeBase kb;
  /// Input positions of documents that preprocessed to nothing.
  std::vector<std::size_t> dropped;
};

/// Preprocesses every document with one shared pipeline, builds the
/// vocabulary over all of them and vectorizes each one. Documents that end
/// up empty are left out and reported in `dropped`.
inline BuildResult build_kb(const Corpus& corpus, const BuildConfig& config,
                            std::size_t workers = 1) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no documents");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].category.empty()) {
      throw Error(ErrorKind::ConfigInvalid,
                  "document " + std::to_string(i) + " has an empty category");
    }
  }

  std::vector<TokenList> tokens(corpus.size());
  parallel_for_chunks(corpus.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) tokens[i] = config.pipeline(corpus[i].text);
  });

  BuildResult out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (tokens[i].empty() ? out.dropped : kept).push_back(i);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::AllDocumentsFiltered,
                "every document was reduced to nothing by preprocessing");
  }

  auto& kb = out.kb;
  kb.vocabulary = build_vocabulary(tokens);
  kb.fingerprint = config.fingerprint();
  kb.mode = config.mode;

  // Class ids follow lexicographic category order over the kept documents.
  std::map<std::string, std::size_t> class_of;
  for (const auto i : kept) class_of.emplace(corpus[i].category, 0);
  for (auto& [name, id] : class_of) {
    id = kb.categories.size();
    kb.categories.push_back(name);
  }

  kb.rows.resize(kept.size());
  kb.labels.resize(kept.size());
  parallel_for_chunks(kept.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      kb.rows[r] = vectorize(tokens[kept[r]], kb.vocabulary, config.mode);
      kb.labels[r] = class_of.at(corpus[kept[r]].category);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
// {"kbFormat": 1, "checksum": "<crc32 of payload.dump()>", "payload": {
//    "fingerprint", "mode", "vocabulary", "categories", "labels",
//    "rows": [[[index, value], ...], ...] }}

inline nlohmann::json kb_payload(const KnowledgeBase& kb) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : kb.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& e : row.entries()) r.push_back({e.index, e.value});
    rows.push_back(std::move(r));
  }
  return {{"fingerprint", kb.fingerprint},
          {"mode", std::string(to_string(kb.mode))},
          {"vocabulary", kb.vocabulary.terms()},
          {"categories", kb.categories},
          {"labels", kb.labels},
          {"rows", std::move(rows)}};
}

inline std::string serialize_kb(const KnowledgeBase& kb) {
  auto payload = kb_payload(kb);
  const auto checksum = crc32_hex(payload.dump());
  nlohmann::json doc = {
      {"kbFormat", kKbFormatVersion}, {"checksum", checksum}, {"payload", std::move(payload)}};
  return doc.dump();
}

inline KnowledgeBase deserialize_kb(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptFile, std::string("knowledge base is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("kbFormat") || !doc["kbFormat"].is_number_integer()) {
    throw Error(ErrorKind::CorruptFile, "missing integer 'kbFormat'");
  }
  if (const auto version = doc["kbFormat"].get<long long>(); version != kKbFormatVersion) {
    throw Error(ErrorKind::FormatVersionMismatch,
                "knowledge base format " + std::to_string(version) + ", expected " +
                    std::to_string(kKbFormatVersion));
  }
  if (!doc.contains("checksum") || !doc["checksum"].is_string() || !doc.contains("payload")) {
    throw Error(ErrorKind::CorruptFile, "missing 'checksum' or 'payload'");
  }
  const auto& payload = doc["payload"];
  if (crc32_hex(payload.dump()) != doc["checksum"].get<std::string>()) {
    throw Error(ErrorKind::CorruptFile, "knowledge base checksum mismatch");
  }

  KnowledgeBase kb;
  try {
    kb.fingerprint = payload.at("fingerprint").get<std::string>();
    kb.mode = parse_vector_mode(payload.at("mode").get<std::string>());
    const auto terms = payload.at("vocabulary").get<std::vector<std::string>>();
    kb.vocabulary = Vocabulary(terms);
    if (kb.vocabulary.terms() != terms) {
      throw Error(ErrorKind::CorruptFile, "vocabulary is not sorted and distinct");
    }
    kb.categories = payload.at("categories").get<std::vector<std::string>>();
    kb.labels = payload.at("labels").get<std::vector<std::size_t>>();
    for (const auto& r : payload.at("rows")) {
      std::vector<Entry> entries;
      for (const auto& e : r) {
        entries.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
      }
      kb.rows.emplace_back(kb.vocabulary.size(), std::move(entries));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptFile, std::string("malformed knowledge base: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptFile) throw;
    throw Error(ErrorKind::CorruptFile, std::string("malformed knowledge base: ") + e.what());
  }
  kb.validate(ErrorKind::CorruptFile);
  return kb;
}

inline void save_kb(const KnowledgeBase& kb, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write '" + path + "'");
  out << serialize_kb(kb) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
}

inline KnowledgeBase load_kb(const std::string& path) {
  auto in = detail::open_input(path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(ErrorKind::IoFailure, "read of '" + path + "' failed");
  return deserialize_kb(bytes);
}

}  // namespace domsim
