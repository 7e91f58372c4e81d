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

// Training-data augmentation: span masking and adjacent-word swapping.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustqa/common.hpp"
#include "robustqa/corpus.hpp"
#include "robustqa/jsonl.hpp"

namespace robustqa::augment {

enum class MaskMode {
  Bernoulli,  // each answer span masked independently with the configured rate
  Quota,      // exactly round(rate * eligible) records get their answer span masked
};

struct AugmentConfig {
  double answer_span_mask_rate = 0.4;
  double other_span_mask_rate = 0.1;
  bool swap_enabled = true;
  std::size_t swap_window = 1;
  MaskMode mask_mode = MaskMode::Bernoulli;
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct AugmentOp {
  enum class Kind { Mask, Swap };
  Kind kind = Kind::Mask;
  std::size_t span = 0;      // span index in the text the op was applied to
  std::size_t position = 0;  // swap: number of units before the swapped boundary
  std::size_t window = 0;    // swap: units on each side

  bool operator==(const AugmentOp&) const = default;
};

struct AugmentedExample {
  std::string id;
  std::string context;
  std::vector<AugmentOp> applied_ops;

  bool operator==(const AugmentedExample&) const = default;
};

void to_json(json& j, const AugmentOp& op);
void from_json(const json& j, AugmentOp& op);
/// Wire schema: {id, context_augmented, applied_ops}.
void to_json(json& j, const AugmentedExample& ex);
void from_json(const json& j, AugmentedExample& ex);

/// Removes each span independently: spans overlapping an answer occurrence with
/// answer_span_mask_rate, the rest with other_span_mask_rate. A removed span
/// takes its trailing delimiters along. If every span is drawn, the longest
/// survives. `force_answer_mask` replaces the draw for answer spans.
/// Mask ops are recorded against the original segmentation.
AugmentedExample mask_spans(std::string_view context, std::string_view answer, Language lang,
                            const AugmentConfig& config, Rng& rng,
                            std::optional<bool> force_answer_mask = std::nullopt);

/// Interchanges swap_window units on either side of one boundary inside one
/// span. Span and boundary are drawn uniformly among the eligible ones. With no
/// eligible span the input comes back unchanged and applied_ops is empty.
AugmentedExample swap_words(std::string_view context, Language lang, const AugmentConfig& config,
                            Rng& rng);

/// Re-applies recorded ops to the original context: masks against the original
/// segmentation, then swaps against the re-segmented result.
std::string replay_ops(std::string_view original, Language lang, const std::vector<AugmentOp>& ops);

/// Mask then (if enabled) swap on every record with a per-record stream
/// derived from (seed, record id). Records that fail are logged and emitted
/// untransformed. Output order equals input order.
std::vector<AugmentedExample> build_training_set(const std::vector<QARecord>& records,
                                                 const AugmentConfig& config);

}  // namespace robustqa::augment
