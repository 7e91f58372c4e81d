/*
 * Copyright 2026 The robustqa Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "robustqa/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace robustqa::text {

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
         (cp >= 0x3014 && cp <= 0x301F) || cp == 0x30FB || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0x4E00 && cp <= 0x9FFF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FFFF) ||
         (cp >= 0x3040 && cp <= 0x30FF && cp != 0x30FB) || (cp >= 0xAC00 && cp <= 0xD7AF);
}

bool is_span_delimiter(char32_t cp) {
  switch (cp) {
    case U',':
    case U'.':
    case U';':
    case U':':
    case U'!':
    case U'?':
    case 0xFF0C:
    case 0x3002:
    case 0xFF1B:
    case 0xFF1A:
    case 0xFF01:
    case 0xFF1F:
      return true;
    default:
      return false;
  }
}

bool is_sentence_final(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F;
}

char32_t casefold(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 0x20;
  return cp;
}

std::string casefold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& c : decode_utf8(s)) append_utf8(out, casefold(c.value));
  return out;
}

namespace {

void tokenize_english(std::string_view text, std::vector<std::string>& out) {
  const auto cps = decode_utf8(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i].value)) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && is_punct(cps[b].value)) ++b;
    while (e > b && is_punct(cps[e - 1].value)) --e;
    if (b < e) {
      std::string tok;
      for (std::size_t k = b; k < e; ++k) append_utf8(tok, casefold(cps[k].value));
      out.push_back(std::move(tok));
    }
    i = j;
  }
}

void tokenize_chinese(std::string_view text, std::vector<std::string>& out) {
  std::string run;
  auto flush = [&] {
    if (!run.empty()) {
      out.push_back(std::move(run));
      run.clear();
    }
  };
  for (const auto& c : decode_utf8(text)) {
    if (is_space(c.value) || is_punct(c.value)) {
      flush();
    } else if (is_cjk(c.value)) {
      flush();
      std::string tok;
      append_utf8(tok, c.value);
      out.push_back(std::move(tok));
    } else {
      append_utf8(run, casefold(c.value));
    }
  }
  flush();
}

// Normalized text with, for every normalized byte, the source byte range of
// the code point it came from.
struct MappedText {
  std::string text;
  std::vector<ByteRange> origin;
};

MappedText normalize_mapped(std::string_view text, Language lang) {
  MappedText m;
  m.text.reserve(text.size());
  m.origin.reserve(text.size());
  auto emit = [&m](char32_t cp, ByteRange src) {
    const std::size_t before = m.text.size();
    append_utf8(m.text, cp);
    m.origin.insert(m.origin.end(), m.text.size() - before, src);
  };
  const auto cps = decode_utf8(text);
  if (lang == Language::Chinese) {
    for (const auto& c : cps) emit(casefold(c.value), {c.begin, c.end});
    return m;
  }
  bool pending_space = false;
  for (const auto& c : cps) {
    if (is_space(c.value) || is_punct(c.value)) {
      pending_space = !m.text.empty();
      continue;
    }
    if (pending_space) {
      emit(U' ', {c.begin, c.begin});
      pending_space = false;
    }
    emit(casefold(c.value), {c.begin, c.end});
  }
  return m;
}

// A letter/digit code point that does not form a token on its own.
bool is_run_char(char32_t cp) { return !is_space(cp) && !is_punct(cp) && !is_cjk(cp); }

// Last code point ending at byte `pos` / first code point starting at `pos`.
char32_t cp_before(std::string_view s, std::size_t pos) {
  if (pos == 0) return U' ';
  std::size_t b = pos - 1;
  while (b > 0 && (static_cast<unsigned char>(s[b]) & 0xC0) == 0x80) --b;
  const auto cps = decode_utf8(s.substr(b, pos - b));
  return cps.empty() ? U' ' : cps.back().value;
}

char32_t cp_at(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return U' ';
  const auto cps = decode_utf8(s.substr(pos, std::min<std::size_t>(4, s.size() - pos)));
  return cps.empty() ? U' ' : cps.front().value;
}

}  // namespace

TokenSeq tokenize(std::string_view text, Language lang) {
  TokenSeq seq;
  seq.language = lang;
  if (lang == Language::English) {
    tokenize_english(text, seq.tokens);
  } else {
    tokenize_chinese(text, seq.tokens);
  }
  return seq;
}

std::string SpanSegmentation::reassemble() const {
  std::vector<ByteRange> pieces = spans;
  pieces.insert(pieces.end(), delimiters.begin(), delimiters.end());
  std::sort(pieces.begin(), pieces.end(),
            [](const ByteRange& a, const ByteRange& b) { return a.begin < b.begin; });
  std::string out;
  out.reserve(source.size());
  for (const auto& p : pieces) out.append(source, p.begin, p.size());
  return out;
}

SpanSegmentation segment_spans(std::string_view text) {
  SpanSegmentation seg;
  seg.source = std::string(text);
  std::size_t span_start = 0;
  for (const auto& c : decode_utf8(text)) {
    if (!is_span_delimiter(c.value)) continue;
    if (c.begin > span_start) seg.spans.push_back({span_start, c.begin});
    seg.delimiters.push_back({c.begin, c.end});
    span_start = c.end;
  }
  if (text.size() > span_start) seg.spans.push_back({span_start, text.size()});
  return seg;
}

std::vector<ByteRange> split_sentences(std::string_view text) {
  std::vector<ByteRange> out;
  const auto cps = decode_utf8(text);
  std::size_t start = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].value;
    if (!is_sentence_final(cp)) continue;
    std::size_t j = i + 1;
    // Trailing closers stay with the sentence they close.
    while (j < cps.size() && (cps[j].value == U'"' || cps[j].value == U'\'' ||
                              cps[j].value == U')' || cps[j].value == 0x201D ||
                              cps[j].value == 0x2019 || cps[j].value == 0x300D)) {
      ++j;
    }
    const bool ascii = cp < 0x80;
    if (ascii && j < cps.size() && !is_space(cps[j].value)) continue;
    const std::size_t end = j < cps.size() ? cps[j].begin : text.size();
    if (end > start) out.push_back({start, end});
    start = end;
    i = j - 1;
  }
  if (text.size() > start) out.push_back({start, text.size()});
  return out;
}

std::string normalize(std::string_view text, Language lang) {
  return normalize_mapped(text, lang).text;
}

bool contains_answer(std::string_view text, std::string_view answer, Language lang) {
  const std::string needle = normalize(answer, lang);
  if (needle.empty()) throw std::invalid_argument("contains_answer: empty answer");
  return normalize(text, lang).find(needle) != std::string::npos;
}

std::vector<ByteRange> find_occurrences(std::string_view text, std::string_view answer,
                                        Language lang, bool whole_word) {
  const std::string needle = normalize(answer, lang);
  if (needle.empty()) throw std::invalid_argument("find_occurrences: empty answer");
  const MappedText hay = normalize_mapped(text, lang);
  std::vector<ByteRange> out;
  std::size_t pos = 0;
  while ((pos = hay.text.find(needle, pos)) != std::string::npos) {
    const std::size_t end = pos + needle.size();
    if (whole_word) {
      const bool left_glued = is_run_char(cp_before(hay.text, pos)) && is_run_char(cp_at(hay.text, pos));
      const bool right_glued = is_run_char(cp_before(hay.text, end)) && is_run_char(cp_at(hay.text, end));
      if (left_glued || right_glued) {
        ++pos;
        continue;
      }
    }
    out.push_back({hay.origin[pos].begin, hay.origin[end - 1].end});
    pos = end;
  }
  return out;
}

TfIdfModel TfIdfModel::fit(const std::vector<std::string>& contexts, Language lang) {
  if (contexts.empty()) throw std::invalid_argument("tfidf_fit: no documents");
  TfIdfModel model;
  model.document_count_ = contexts.size();
  model.language_ = lang;
  for (const auto& doc : contexts) {
    const auto seq = tokenize(doc, lang);
    std::unordered_set<std::string> seen(seq.tokens.begin(), seq.tokens.end());
    for (const auto& tok : seen) ++model.df_[tok];
  }
  return model;
}

std::size_t TfIdfModel::document_frequency(const std::string& token) const {
  const auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double TfIdfModel::idf(const std::string& token) const {
  const double n = static_cast<double>(document_count_);
  const double df = static_cast<double>(document_frequency(token));
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

std::vector<Keyword> tfidf_scored_keywords(const TfIdfModel& model, std::string_view question,
                                           std::size_t k) {
  if (k == 0) throw std::invalid_argument("tfidf_keywords: k must be >= 1");
  const auto seq = tokenize(question, model.language());
  if (seq.empty()) throw std::invalid_argument("tfidf_keywords: question has no tokens");

  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& tok : seq.tokens) {
    if (tf[tok]++ == 0) order.push_back(tok);
  }
  std::vector<Keyword> scored;
  scored.reserve(order.size());
  for (const auto& tok : order) {
    scored.push_back({tok, static_cast<double>(tf[tok]) * model.idf(tok)});
  }
  // stable_sort keeps first-occurrence order among equal scores.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Keyword& a, const Keyword& b) { return a.score > b.score; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<std::string> tfidf_keywords(const TfIdfModel& model, std::string_view question,
                                        std::size_t k) {
  std::vector<std::string> out;
  for (auto& kw : tfidf_scored_keywords(model, question, k)) out.push_back(std::move(kw.token));
  return out;
}

}  // namespace robustqa::text
