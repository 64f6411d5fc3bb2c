#pragma once

// Text preprocessing: tokenize -> stopword removal -> dictionary lemmatization.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "domsim/error.hpp"

namespace domsim {

/// A normalized lexical unit: non-empty, lowercase, letters and digits only.
using Token = std::string;
using TokenList = std::vector<Token>;

namespace detail {

inline bool is_token_char(UChar32 c) { return u_isalpha(c) || u_isdigit(c); }

inline void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(buf, static_cast<std::size_t>(len));
}

/// Iterates the code points of a UTF-8 string; malformed bytes yield a
/// negative code point, which callers treat as a separator.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
  const auto* data = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(data, i, length, c);
    fn(c);
  }
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename Fn>
void for_each_content_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    fn(line, line_no);
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Simple (one-to-one) Unicode lowercase mapping of every code point.
inline std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  detail::for_each_code_point(text, [&](UChar32 c) {
    if (c < 0) c = 0xFFFD;
    detail::append_utf8(out, u_tolower(c));
  });
  return out;
}

/// Splits lowercased text into maximal runs of Unicode letters and digits.
/// Everything else (punctuation, symbols, whitespace, malformed UTF-8) is a
/// separator and is dropped.
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  detail::for_each_code_point(text, [&](UChar32 c) {
    if (c >= 0) c = u_tolower(c);
    if (c >= 0 && detail::is_token_char(c)) {
      detail::append_utf8(current, c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

class StopwordList {
 public:
  StopwordList() = default;

  template <typename Range>
  explicit StopwordList(const Range& terms) {
    for (const auto& t : terms) insert(t);
  }

  StopwordList(std::initializer_list<std::string_view> terms) {
    for (auto t : terms) insert(t);
  }

  /// One term per line; blank lines and `#` comment lines are skipped.
  static StopwordList read(std::istream& in) {
    StopwordList list;
    detail::for_each_content_line(in, [&](const std::string& line, std::size_t) {
      list.insert(detail::trim(line));
    });
    return list;
  }

  static StopwordList load(const std::string& path) {
    auto in = detail::open_input(path);
    return read(in);
  }

  void insert(std::string_view term) { entries_.insert(to_lower(term)); }

  bool contains(std::string_view token) const {
    return entries_.find(std::string(token)) != entries_.end();
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<std::string> sorted_entries() const {
    std::vector<std::string> out(entries_.begin(), entries_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::unordered_set<std::string> entries_;
};

/// Inflected form -> lemma lookup with identity fallback.
///
/// Every lemma that also appears as a form must map to itself, so applying
/// the lexicon twice is the same as applying it once.
class LemmaLexicon {
 public:
  LemmaLexicon() = default;

  LemmaLexicon(std::initializer_list<std::pair<std::string_view, std::string_view>> pairs) {
    for (const auto& [form, lemma] : pairs) add(form, lemma);
    validate();
  }

  /// `inflected<TAB>lemma` per line, `#` lines ignored. Duplicate forms and
  /// malformed lines are load errors.
  static LemmaLexicon read(std::istream& in) {
    LemmaLexicon lex;
    detail::for_each_content_line(in, [&](const std::string& line, std::size_t line_no) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
        throw Error(ErrorKind::ConfigInvalid,
                    "lemma lexicon line " + std::to_string(line_no) +
                        ": expected 'inflected<TAB>lemma'");
      }
      lex.add(detail::trim(std::string_view(line).substr(0, tab)),
              detail::trim(std::string_view(line).substr(tab + 1)), line_no);
    });
    lex.validate();
    return lex;
  }

  static LemmaLexicon load(const std::string& path) {
    auto in = detail::open_input(path);
    return read(in);
  }

  const std::string& lookup(const std::string& form) const {
    const auto it = mapping_.find(form);
    return it == mapping_.end() ? form : it->second;
  }

  std::size_t size() const noexcept { return mapping_.size(); }
  bool empty() const noexcept { return mapping_.empty(); }

  std::vector<std::pair<std::string, std::string>> sorted_entries() const {
    std::vector<std::pair<std::string, std::string>> out(mapping_.begin(), mapping_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  void add(std::string_view raw_form, std::string_view raw_lemma, std::size_t line_no = 0) {
    auto form = to_lower(raw_form);
    auto lemma = to_lower(raw_lemma);
    const auto where = line_no ? " (line " + std::to_string(line_no) + ")" : std::string{};
    for (const auto* term : {&form, &lemma}) {
      const auto toks = tokenize(*term);
      if (toks.size() != 1 || toks.front() != *term) {
        throw Error(ErrorKind::ConfigInvalid,
                    "lemma lexicon entry '" + *term + "' is not a single token" + where);
      }
    }
    if (!mapping_.emplace(form, std::move(lemma)).second) {
      throw Error(ErrorKind::DuplicateLemma,
                  "duplicate inflected form '" + form + "' in lemma lexicon" + where);
    }
  }

  void validate() const {
    for (const auto& [form, lemma] : mapping_) {
      const auto it = mapping_.find(lemma);
      if (it != mapping_.end() && it->second != lemma) {
        throw Error(ErrorKind::ConfigInvalid, "lemma '" + lemma + "' (from '" + form +
                                                  "') is itself mapped to '" + it->second + "'");
      }
    }
  }

  std::unordered_map<std::string, std::string> mapping_;
};

inline TokenList remove_stopwords(const TokenList& tokens, const StopwordList& stoplist) {
  TokenList out;
  out.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
               [&](const Token& t) { return !stoplist.contains(t); });
  return out;
}

inline TokenList lemmatize(const TokenList& tokens, const LemmaLexicon& lexicon) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lexicon.lookup(t));
  return out;
}

/// The fixed preprocessing chain shared by knowledge-base construction and
/// queries: tokenize, drop stopwords, then lemmatize.
struct Pipeline {
  StopwordList stopwords;
  LemmaLexicon lemmas;

  TokenList operator()(std::string_view text) const {
    return lemmatize(remove_stopwords(tokenize(text), stopwords), lemmas);
  }

  /// Stable textual description of both resources, used for fingerprinting.
  std::string canonical_description() const {
    std::string out = "stopwords:";
    for (const auto& s : stopwords.sorted_entries()) {
      out += s;
      out += '\n';
    }
    out += "lemmas:";
    for (const auto& [form, lemma] : lemmas.sorted_entries()) {
      out += form;
      out += '\t';
      out += lemma;
      out += '\n';
    }
    return out;
  }
};

inline TokenList preprocess(std::string_view text, const Pipeline& pipeline) {
  return pipeline(text);
}

}  // namespace domsim
