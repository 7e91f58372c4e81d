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

// Local triple store: "|||" rendering/parsing, an inverted index and
// relevance-ranked retrieval with answer exclusion.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "robustqa/common.hpp"
#include "robustqa/jsonl.hpp"
#include "robustqa/text.hpp"

namespace robustqa::triples {

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;

  bool operator==(const Triple&) const = default;
};

void to_json(json& j, const Triple& t);
void from_json(const json& j, Triple& t);

/// Fields must be non-empty and free of "|||", ", " and line breaks so the
/// rendered form parses back unambiguously.
void validate_triple(const Triple& t);
bool is_valid_triple(const Triple& t) noexcept;

/// "head ||| relation ||| tail"
std::string render_triple(const Triple& t);
/// Rendered triples joined by ", ".
std::string render_triples(std::span<const Triple> triples);

class MalformedTripleError : public DataError {
 public:
  MalformedTripleError(std::string fragment, std::size_t line);
  const std::string& fragment() const noexcept { return fragment_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string fragment_;
  std::size_t line_;
};

/// Accepts the comma-joined rendering, one triple per line, or a mix of both.
/// List bullets ("- ", "* ", "1. ", "2) ") are ignored. Throws on the first
/// fragment that does not have exactly three non-empty fields.
std::vector<Triple> parse_triples(std::string_view text);

struct LenientParse {
  std::vector<Triple> triples;
  std::vector<std::pair<std::size_t, std::string>> rejected;  // (line, fragment)
};
LenientParse parse_triples_lenient(std::string_view text);

/// One triple per line, tab-separated. Invalid rows are skipped with a warning;
/// rows with the wrong column count raise DataError with the line number.
std::vector<Triple> read_triples_tsv(const std::filesystem::path& path);

struct Posting {
  std::size_t id;
  std::size_t tf;
};

class TripleIndex {
 public:
  static constexpr int kFormatVersion = 1;

  static TripleIndex build(std::vector<Triple> triples, Language lang = Language::English);

  std::size_t size() const { return triples_.size(); }
  const Triple& triple(std::size_t id) const { return triples_.at(id); }
  const std::vector<Triple>& triples() const { return triples_; }
  Language language() const { return language_; }
  std::size_t length(std::size_t id) const { return lengths_.at(id); }
  double average_length() const { return average_length_; }
  /// Empty span for unknown tokens. Postings are sorted by id.
  std::span<const Posting> postings(const std::string& token) const;
  std::size_t vocabulary_size() const { return postings_.size(); }

  void save(const std::filesystem::path& path) const;
  static TripleIndex load(const std::filesystem::path& path);
  json to_json() const;
  static TripleIndex from_json(const json& j);

 private:
  std::vector<Triple> triples_;
  std::vector<std::size_t> lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double average_length_ = 0.0;
  Language language_ = Language::English;
};

struct ScoredTriple {
  std::size_t id;
  double score;
};

class TripleScorer {
 public:
  virtual ~TripleScorer() = default;
  /// Every triple sharing at least one term, with a positive score; any order.
  virtual std::vector<ScoredTriple> score(const TripleIndex& index, const text::TokenSeq& terms) const = 0;
};

class Bm25Scorer final : public TripleScorer {
 public:
  explicit Bm25Scorer(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}
  std::vector<ScoredTriple> score(const TripleIndex& index, const text::TokenSeq& terms) const override;

  /// ln(1 + (N - df + 0.5) / (df + 0.5))
  static double idf(std::size_t n, std::size_t df);

 private:
  double k1_;
  double b_;
};

inline constexpr std::size_t kDefaultRetrievalLimit = 10;

/// Ranks triples, drops those whose rendering contains `exclude`, sorts by
/// descending score (ties by ascending id) and truncates to `limit`.
std::vector<ScoredTriple> query(const TripleIndex& index, const text::TokenSeq& terms,
                                std::size_t limit = kDefaultRetrievalLimit,
                                std::optional<std::string_view> exclude = std::nullopt,
                                const TripleScorer& scorer = Bm25Scorer());

}  // namespace robustqa::triples
