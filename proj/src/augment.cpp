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

#include "robustqa/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robustqa/log.hpp"
#include "robustqa/text.hpp"

namespace robustqa::augment {

using text::ByteRange;

void AugmentConfig::validate() const {
  auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0.0 && r <= 1.0; };
  if (!rate_ok(answer_span_mask_rate)) throw ConfigError("augment.answer_span_mask_rate must be in [0,1]");
  if (!rate_ok(other_span_mask_rate)) throw ConfigError("augment.other_span_mask_rate must be in [0,1]");
  if (swap_window < 1) throw ConfigError("augment.swap_window must be >= 1");
}

void to_json(json& j, const AugmentOp& op) {
  if (op.kind == AugmentOp::Kind::Mask) {
    j = json{{"op", "mask"}, {"span", op.span}};
  } else {
    j = json{{"op", "swap"}, {"span", op.span}, {"position", op.position}, {"window", op.window}};
  }
}

void from_json(const json& j, AugmentOp& op) {
  const auto kind = require<std::string>(j, "op");
  op.span = require<std::size_t>(j, "span");
  if (kind == "mask") {
    op.kind = AugmentOp::Kind::Mask;
    op.position = 0;
    op.window = 0;
  } else if (kind == "swap") {
    op.kind = AugmentOp::Kind::Swap;
    op.position = require<std::size_t>(j, "position");
    op.window = require<std::size_t>(j, "window");
  } else {
    throw DataError("unknown augment op '" + kind + "'");
  }
}

void to_json(json& j, const AugmentedExample& ex) {
  j = json{{"id", ex.id}, {"context_augmented", ex.context}, {"applied_ops", ex.applied_ops}};
}

void from_json(const json& j, AugmentedExample& ex) {
  ex.id = require<std::string>(j, "id");
  ex.context = require<std::string>(j, "context_augmented");
  ex.applied_ops = require<std::vector<AugmentOp>>(j, "applied_ops");
}

namespace {

bool overlaps(const ByteRange& a, const ByteRange& b) { return a.begin < b.end && b.begin < a.end; }

// Drops the marked spans together with the delimiters that follow them.
std::string drop_spans(const text::SpanSegmentation& seg, const std::vector<bool>& removed) {
  std::string out;
  out.reserve(seg.source.size());
  const std::size_t n = seg.spans.size();
  out.append(seg.source, 0, n ? seg.spans[0].begin : seg.source.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t tail_end = i + 1 < n ? seg.spans[i + 1].begin : seg.source.size();
    if (!removed[i]) out.append(seg.source, seg.spans[i].begin, tail_end - seg.spans[i].begin);
  }
  return out;
}

// Swappable units of a span: whitespace-separated words (English), or single
// CJK/punctuation characters and letter/digit runs (Chinese).
std::vector<ByteRange> span_units(std::string_view source, ByteRange span, Language lang) {
  std::vector<ByteRange> units;
  const auto cps = text::decode_utf8(source.substr(span.begin, span.size()));
  bool in_run = false;
  for (const auto& c : cps) {
    const ByteRange r{span.begin + c.begin, span.begin + c.end};
    if (text::is_space(c.value)) {
      in_run = false;
      continue;
    }
    const bool single = lang == Language::Chinese && (text::is_cjk(c.value) || text::is_punct(c.value));
    if (single) {
      units.push_back(r);
      in_run = false;
    } else if (in_run) {
      units.back().end = r.end;
    } else {
      units.push_back(r);
      in_run = true;
    }
  }
  return units;
}

std::string apply_swap(std::string_view source, const std::vector<ByteRange>& units,
                       std::size_t position, std::size_t window) {
  const ByteRange left{units[position - window].begin, units[position - 1].end};
  const ByteRange right{units[position].begin, units[position + window - 1].end};
  std::string out;
  out.reserve(source.size());
  out.append(source.substr(0, left.begin));
  out.append(source.substr(right.begin, right.size()));
  out.append(source.substr(left.end, right.begin - left.end));
  out.append(source.substr(left.begin, left.size()));
  out.append(source.substr(right.end));
  return out;
}

std::vector<std::string> sorted_tokens(std::string_view s, Language lang) {
  auto toks = text::tokenize(s, lang).tokens;
  std::sort(toks.begin(), toks.end());
  return toks;
}

// Boundaries whose swap keeps the span's token multiset. Adjacent letter runs
// in Chinese text could otherwise fuse into a single token.
std::vector<std::size_t> eligible_positions(std::string_view source, ByteRange span,
                                            const std::vector<ByteRange>& units, std::size_t window,
                                            Language lang) {
  std::vector<std::size_t> out;
  if (units.size() < 2 * window) return out;
  const std::string_view span_text = source.substr(span.begin, span.size());
  std::vector<std::string> before;
  if (lang == Language::Chinese) before = sorted_tokens(span_text, lang);
  for (std::size_t p = window; p + window <= units.size(); ++p) {
    if (lang == Language::Chinese) {
      std::vector<ByteRange> rel(units);
      for (auto& u : rel) {
        u.begin -= span.begin;
        u.end -= span.begin;
      }
      if (sorted_tokens(apply_swap(span_text, rel, p, window), lang) != before) continue;
    }
    out.push_back(p);
  }
  return out;
}

std::string swap_in_text(std::string_view source, Language lang, std::size_t span_index,
                         std::size_t position, std::size_t window) {
  const auto seg = text::segment_spans(source);
  if (span_index >= seg.spans.size()) throw DataError("swap op: span index out of range");
  const auto units = span_units(source, seg.spans[span_index], lang);
  if (window == 0 || position < window || position + window > units.size()) {
    throw DataError("swap op: position out of range");
  }
  return apply_swap(source, units, position, window);
}

}  // namespace

AugmentedExample mask_spans(std::string_view context, std::string_view answer, Language lang,
                            const AugmentConfig& config, Rng& rng,
                            std::optional<bool> force_answer_mask) {
  const auto seg = text::segment_spans(context);
  if (seg.spans.empty()) throw std::invalid_argument("mask_spans: empty context");

  std::vector<ByteRange> occurrences;
  if (!answer.empty() && !text::normalize(answer, lang).empty()) {
    occurrences = text::find_occurrences(context, answer, lang, /*whole_word=*/false);
  }
  const std::size_t n = seg.spans.size();
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const bool answer_span = std::any_of(occurrences.begin(), occurrences.end(),
                                         [&](const ByteRange& o) { return overlaps(o, seg.spans[i]); });
    const double rate = answer_span ? config.answer_span_mask_rate : config.other_span_mask_rate;
    const bool draw = rng.bernoulli(rate);
    removed[i] = (answer_span && force_answer_mask) ? *force_answer_mask : draw;
  }
  if (std::all_of(removed.begin(), removed.end(), [](bool b) { return b; })) {
    std::size_t keep = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (seg.spans[i].size() > seg.spans[keep].size()) keep = i;
    }
    removed[keep] = false;
  }

  AugmentedExample ex;
  ex.context = drop_spans(seg, removed);
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) ex.applied_ops.push_back({AugmentOp::Kind::Mask, i, 0, 0});
  }
  return ex;
}

AugmentedExample swap_words(std::string_view context, Language lang, const AugmentConfig& config,
                            Rng& rng) {
  const auto seg = text::segment_spans(context);
  struct Candidate {
    std::size_t span;
    std::vector<ByteRange> units;
    std::vector<std::size_t> positions;
  };
  std::vector<Candidate> eligible;
  for (std::size_t i = 0; i < seg.spans.size(); ++i) {
    auto units = span_units(context, seg.spans[i], lang);
    auto positions = eligible_positions(context, seg.spans[i], units, config.swap_window, lang);
    if (!positions.empty()) eligible.push_back({i, std::move(units), std::move(positions)});
  }
  AugmentedExample ex;
  if (eligible.empty()) {
    ex.context = std::string(context);
    return ex;
  }
  const auto& pick = eligible[rng.below(eligible.size())];
  const std::size_t position = pick.positions[rng.below(pick.positions.size())];
  ex.context = apply_swap(context, pick.units, position, config.swap_window);
  ex.applied_ops.push_back({AugmentOp::Kind::Swap, pick.span, position, config.swap_window});
  return ex;
}

std::string replay_ops(std::string_view original, Language lang, const std::vector<AugmentOp>& ops) {
  const auto seg = text::segment_spans(original);
  std::vector<bool> removed(seg.spans.size(), false);
  bool any_mask = false;
  for (const auto& op : ops) {
    if (op.kind != AugmentOp::Kind::Mask) continue;
    if (op.span >= seg.spans.size()) throw DataError("mask op: span index out of range");
    removed[op.span] = true;
    any_mask = true;
  }
  std::string current = any_mask ? drop_spans(seg, removed) : std::string(original);
  for (const auto& op : ops) {
    if (op.kind == AugmentOp::Kind::Swap) {
      current = swap_in_text(current, lang, op.span, op.position, op.window);
    }
  }
  return current;
}

std::vector<AugmentedExample> build_training_set(const std::vector<QARecord>& records,
                                                 const AugmentConfig& config) {
  config.validate();

  // Quota mode picks the exact set of records whose answer span is masked.
  std::vector<std::optional<bool>> forced(records.size());
  if (config.mask_mode == MaskMode::Quota) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (!r.answer.empty() && !text::normalize(r.answer, r.language).empty() &&
          text::contains_answer(r.context, r.answer, r.language)) {
        candidates.push_back(i);
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
    const auto quota = static_cast<std::size_t>(
        std::llround(config.answer_span_mask_rate * static_cast<double>(candidates.size())));
    Rng rng(derive_seed(config.seed, "mask-quota"));
    for (std::size_t i = 0; i < quota; ++i) {
      std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) forced[candidates[i]] = i < quota;
  }

  std::vector<AugmentedExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Rng rng(derive_seed(config.seed, r.id));
    try {
      AugmentedExample ex = mask_spans(r.context, r.answer, r.language, config, rng, forced[i]);
      if (config.swap_enabled) {
        AugmentedExample swapped = swap_words(ex.context, r.language, config, rng);
        ex.context = std::move(swapped.context);
        ex.applied_ops.insert(ex.applied_ops.end(), swapped.applied_ops.begin(),
                              swapped.applied_ops.end());
      }
      ex.id = r.id;
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      log::warn("augment: record " + r.id + ": " + e.what() + "; emitted untransformed");
      out.push_back({r.id, r.context, {}});
    }
  }
  return out;
}

}  // namespace robustqa::augment
