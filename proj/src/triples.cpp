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

#include "robustqa/triples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "robustqa/log.hpp"

namespace robustqa::triples {

namespace {

constexpr std::string_view kFieldSep = "|||";
constexpr std::string_view kTripleSep = ", ";

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = s.find(sep, pos);
    if (hit == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
}

std::string_view strip_bullet(std::string_view line) {
  if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') return trim(line.substr(2));
  if (line.rfind("\xE2\x80\xA2 ", 0) == 0) return trim(line.substr(4));  // U+2022
  std::size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
    return trim(line.substr(i + 2));
  }
  return line;
}

template <class OnTriple, class OnBad>
void scan_triples(std::string_view text, OnTriple on_triple, OnBad on_bad) {
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, "\n")) {
    ++line_no;
    std::string_view line = strip_bullet(trim(raw));
    while (!line.empty() && line.back() == ',') line = trim(line.substr(0, line.size() - 1));
    if (line.empty()) continue;
    for (std::string_view chunk : split(line, kTripleSep)) {
      chunk = trim(chunk);
      if (chunk.empty()) continue;
      const auto parts = split(chunk, kFieldSep);
      if (parts.size() != 3 || trim(parts[0]).empty() || trim(parts[1]).empty() || trim(parts[2]).empty()) {
        on_bad(line_no, chunk);
        continue;
      }
      on_triple(Triple{std::string(trim(parts[0])), std::string(trim(parts[1])), std::string(trim(parts[2]))});
    }
  }
}

}  // namespace

void to_json(json& j, const Triple& t) {
  j = json{{"head", t.head}, {"relation", t.relation}, {"tail", t.tail}};
}

void from_json(const json& j, Triple& t) {
  t.head = require<std::string>(j, "head");
  t.relation = require<std::string>(j, "relation");
  t.tail = require<std::string>(j, "tail");
}

bool is_valid_triple(const Triple& t) noexcept {
  for (const std::string* f : {&t.head, &t.relation, &t.tail}) {
    if (trim(*f).empty() || trim(*f).size() != f->size()) return false;
    if (f->find(kFieldSep) != std::string::npos || f->find(kTripleSep) != std::string::npos) return false;
    if (f->find('\n') != std::string::npos || f->find('\t') != std::string::npos) return false;
    if (f->back() == ',') return false;
  }
  return true;
}

void validate_triple(const Triple& t) {
  if (!is_valid_triple(t)) {
    throw DataError("invalid triple field in (" + t.head + " / " + t.relation + " / " + t.tail +
                    "): fields must be non-empty, trimmed, and free of '|||', ', ' and line breaks");
  }
}

std::string render_triple(const Triple& t) { return t.head + " ||| " + t.relation + " ||| " + t.tail; }

std::string render_triples(std::span<const Triple> triples) {
  std::string out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i) out += kTripleSep;
    out += render_triple(triples[i]);
  }
  return out;
}

MalformedTripleError::MalformedTripleError(std::string fragment, std::size_t line)
    : DataError("malformed triple on line " + std::to_string(line) + ": '" + fragment + "'"),
      fragment_(std::move(fragment)),
      line_(line) {}

std::vector<Triple> parse_triples(std::string_view text) {
  std::vector<Triple> out;
  scan_triples(
      text, [&](Triple t) { out.push_back(std::move(t)); },
      [](std::size_t line, std::string_view chunk) { throw MalformedTripleError(std::string(chunk), line); });
  return out;
}

LenientParse parse_triples_lenient(std::string_view text) {
  LenientParse out;
  scan_triples(
      text, [&](Triple t) { out.triples.push_back(std::move(t)); },
      [&](std::size_t line, std::string_view chunk) { out.rejected.emplace_back(line, std::string(chunk)); });
  return out;
}

std::vector<Triple> read_triples_tsv(const std::filesystem::path& path) {
  const std::string content = read_text_file(path);
  std::vector<Triple> out;
  std::size_t line_no = 0;
  for (std::string_view line : split(content, "\n")) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto cols = split(line, "\t");
    if (cols.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields, got " +
                      std::to_string(cols.size()));
    }
    Triple t{std::string(trim(cols[0])), std::string(trim(cols[1])), std::string(trim(cols[2]))};
    if (!is_valid_triple(t)) {
      log::warn(path.string() + ":" + std::to_string(line_no) + ": triple not renderable, skipped");
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

TripleIndex TripleIndex::build(std::vector<Triple> triples, Language lang) {
  if (triples.empty()) throw std::invalid_argument("build_index: no triples");
  TripleIndex idx;
  idx.language_ = lang;
  idx.triples_ = std::move(triples);
  idx.lengths_.reserve(idx.triples_.size());
  double total = 0.0;
  for (std::size_t id = 0; id < idx.triples_.size(); ++id) {
    const Triple& t = idx.triples_[id];
    validate_triple(t);
    const auto seq = text::tokenize(t.head + " " + t.relation + " " + t.tail, lang);
    std::map<std::string, std::size_t> tf;
    for (const auto& tok : seq.tokens) ++tf[tok];
    for (const auto& [tok, n] : tf) idx.postings_[tok].push_back({id, n});
    idx.lengths_.push_back(seq.tokens.size());
    total += static_cast<double>(seq.tokens.size());
  }
  idx.average_length_ = total / static_cast<double>(idx.triples_.size());
  return idx;
}

std::span<const Posting> TripleIndex::postings(const std::string& token) const {
  const auto it = postings_.find(token);
  if (it == postings_.end()) return {};
  return it->second;
}

json TripleIndex::to_json() const {
  json triples = json::array();
  for (const auto& t : triples_) triples.push_back(json::array({t.head, t.relation, t.tail}));
  json postings = json::object();
  for (const auto& [tok, list] : postings_) {
    json arr = json::array();
    for (const auto& p : list) arr.push_back(json::array({p.id, p.tf}));
    postings[tok] = std::move(arr);
  }
  return json{{"format", "robustqa.triple_index"},
              {"version", kFormatVersion},
              {"language", std::string(robustqa::to_string(language_))},
              {"triples", std::move(triples)},
              {"lengths", lengths_},
              {"postings", std::move(postings)}};
}

TripleIndex TripleIndex::from_json(const json& j) {
  if (j.value("format", "") != "robustqa.triple_index") throw DataError("not a triple index file");
  if (j.value("version", -1) != kFormatVersion) {
    throw DataError("unsupported triple index version " + j.value("version", json(-1)).dump());
  }
  TripleIndex idx;
  idx.language_ = parse_language(require<std::string>(j, "language"));
  for (const auto& t : require<json>(j, "triples")) {
    if (!t.is_array() || t.size() != 3) throw DataError("triple index: bad triple entry");
    idx.triples_.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
  }
  idx.lengths_ = require<std::vector<std::size_t>>(j, "lengths");
  if (idx.triples_.empty() || idx.lengths_.size() != idx.triples_.size()) {
    throw DataError("triple index: lengths do not match triples");
  }
  const json postings = require<json>(j, "postings");
  for (const auto& [tok, list] : postings.items()) {
    auto& dst = idx.postings_[tok];
    for (const auto& p : list) {
      const Posting post{p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()};
      if (post.id >= idx.triples_.size() || post.tf == 0) throw DataError("triple index: posting out of range");
      dst.push_back(post);
    }
  }
  double total = 0.0;
  for (auto n : idx.lengths_) total += static_cast<double>(n);
  idx.average_length_ = total / static_cast<double>(idx.lengths_.size());
  return idx;
}

void TripleIndex::save(const std::filesystem::path& path) const { write_text_file(path, to_json().dump() + "\n"); }

TripleIndex TripleIndex::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

double Bm25Scorer::idf(std::size_t n, std::size_t df) {
  const double N = static_cast<double>(n);
  const double d = static_cast<double>(df);
  return std::log(1.0 + (N - d + 0.5) / (d + 0.5));
}

std::vector<ScoredTriple> Bm25Scorer::score(const TripleIndex& index, const text::TokenSeq& terms) const {
  std::unordered_map<std::size_t, double> acc;
  std::vector<std::size_t> order;  // first-hit order keeps summation deterministic
  std::unordered_set<std::string> seen;
  for (const auto& term : terms.tokens) {
    if (!seen.insert(term).second) continue;
    const auto list = index.postings(term);
    if (list.empty()) continue;
    const double w = idf(index.size(), list.size());
    for (const auto& p : list) {
      const double tf = static_cast<double>(p.tf);
      const double norm = 1.0 - b_ + b_ * static_cast<double>(index.length(p.id)) / index.average_length();
      auto [it, fresh] = acc.try_emplace(p.id, 0.0);
      if (fresh) order.push_back(p.id);
      it->second += w * tf * (k1_ + 1.0) / (tf + k1_ * norm);
    }
  }
  std::vector<ScoredTriple> out;
  out.reserve(order.size());
  for (auto id : order) out.push_back({id, acc[id]});
  return out;
}

std::vector<ScoredTriple> query(const TripleIndex& index, const text::TokenSeq& terms, std::size_t limit,
                                std::optional<std::string_view> exclude, const TripleScorer& scorer) {
  if (limit == 0) throw std::invalid_argument("query: limit must be >= 1");
  auto hits = scorer.score(index, terms);
  std::sort(hits.begin(), hits.end(), [](const ScoredTriple& a, const ScoredTriple& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  const bool filter = exclude && !text::normalize(*exclude, index.language()).empty();
  std::vector<ScoredTriple> out;
  // Filtering before truncation: an excluded hit never costs a result slot.
  for (const auto& h : hits) {
    if (out.size() == limit) break;
    if (filter && text::contains_answer(render_triple(index.triple(h.id)), *exclude, index.language())) continue;
    out.push_back(h);
  }
  return out;
}

}  // namespace robustqa::triples
