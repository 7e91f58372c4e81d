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

#pragma once

// Language-aware text primitives: tokenization, punctuation-delimited span
// segmentation, normalization/containment and TF-IDF keyword extraction.
//
// Character classes (bit-exact, see docs/text_rules.md):
//   span delimiters     , . ; : ! ?  U+FF0C U+3002 U+FF1B U+FF1A U+FF01 U+FF1F
//   sentence-final      . ! ? (followed by whitespace or end)  U+3002 U+FF01 U+FF1F
//   punctuation         ASCII ispunct, U+00A1-U+00BF, U+00D7, U+00F7,
//                       U+2010-U+2027, U+2030-U+205E, U+3001-U+3003,
//                       U+3008-U+3011, U+3014-U+301F, U+30FB, U+FF01-U+FF0F,
//                       U+FF1A-U+FF20, U+FF3B-U+FF40, U+FF5B-U+FF65
//   single-char tokens  Han, kana, Hangul syllables

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "robustqa/common.hpp"

namespace robustqa::text {

struct CodePoint {
  char32_t value;
  std::size_t begin;  // byte offset in the source
  std::size_t end;
};

/// Decodes UTF-8; each invalid byte becomes U+FFFD covering that one byte.
std::vector<CodePoint> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_cjk(char32_t cp);
bool is_span_delimiter(char32_t cp);
bool is_sentence_final(char32_t cp);
char32_t casefold(char32_t cp);
std::string casefold(std::string_view s);

struct TokenSeq {
  std::vector<std::string> tokens;
  Language language = Language::English;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// English: casefold, split on whitespace, strip leading/trailing punctuation.
/// Chinese: one token per CJK character; other letter/digit runs kept whole.
TokenSeq tokenize(std::string_view text, Language lang);

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const ByteRange&) const = default;
};

struct SpanSegmentation {
  std::string source;
  std::vector<ByteRange> spans;
  std::vector<ByteRange> delimiters;

  std::string_view span(std::size_t i) const {
    return std::string_view(source).substr(spans[i].begin, spans[i].size());
  }
  /// Rebuilds the source from spans and delimiters.
  std::string reassemble() const;
};

SpanSegmentation segment_spans(std::string_view text);

/// Partitions text into sentences. Each sentence ends after its terminator;
/// the whitespace that follows belongs to the next sentence.
std::vector<ByteRange> split_sentences(std::string_view text);

/// English: casefold, punctuation -> space, whitespace collapsed and trimmed.
/// Chinese: casefold only.
std::string normalize(std::string_view text, Language lang);

/// normalized(answer) is a substring of normalized(text). Throws
/// std::invalid_argument when the answer is empty after normalization.
bool contains_answer(std::string_view text, std::string_view answer, Language lang);

/// Occurrences of the normalized answer inside text, mapped back to byte
/// ranges of the original text. Left to right, non-overlapping. With
/// whole_word, matches that start or end inside a letter/digit run are skipped.
std::vector<ByteRange> find_occurrences(std::string_view text, std::string_view answer,
                                        Language lang, bool whole_word);

class TfIdfModel {
 public:
  static TfIdfModel fit(const std::vector<std::string>& contexts, Language lang);

  std::size_t document_count() const { return document_count_; }
  Language language() const { return language_; }
  /// 0 for unseen tokens.
  std::size_t document_frequency(const std::string& token) const;
  /// ln((1 + N) / (1 + df)) + 1
  double idf(const std::string& token) const;
  const std::unordered_map<std::string, std::size_t>& document_frequencies() const { return df_; }

 private:
  std::size_t document_count_ = 0;
  Language language_ = Language::English;
  std::unordered_map<std::string, std::size_t> df_;
};

struct Keyword {
  std::string token;
  double score;
};

/// Top-k distinct question tokens by tf * idf, ties broken by first occurrence.
std::vector<Keyword> tfidf_scored_keywords(const TfIdfModel& model, std::string_view question,
                                           std::size_t k);
std::vector<std::string> tfidf_keywords(const TfIdfModel& model, std::string_view question,
                                        std::size_t k);

}  // namespace robustqa::text
