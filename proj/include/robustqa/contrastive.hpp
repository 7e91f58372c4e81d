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

// Preference pairs from judged outputs and the contrastive loss over per-token
// log-probabilities:
//   L = sum_i -log sigma( mean(chosen_i) - mean(rejected_i) )

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "robustqa/jsonl.hpp"
#include "robustqa/scenarios.hpp"
#include "robustqa/verdict.hpp"

namespace robustqa::contrastive {

enum class Origin { FromCorrect, FromIncorrect };

std::string_view to_string(Origin o);
Origin parse_origin(std::string_view s);

struct PreferencePair {
  std::string prompt;
  std::string chosen;
  std::string rejected;
  Origin origin = Origin::FromCorrect;

  bool operator==(const PreferencePair&) const = default;
};

void to_json(json& j, const PreferencePair& p);
void from_json(const json& j, PreferencePair& p);

std::vector<std::string> default_refusal_phrases();

/// correct : incorrect share of the pairs.
struct Balance {
  std::size_t correct = 1;
  std::size_t incorrect = 1;
};

/// Prompt text for a sample: context, rendered triples and question.
std::string render_prompt(const scenarios::ScenarioSample& sample);

/// Correct verdicts yield from_correct pairs (chosen = gold, rejected =
/// refusal); wrong verdicts yield from_incorrect pairs (chosen = refusal,
/// rejected = model output); rejected verdicts yield nothing. Each side is
/// downsampled with a seeded shuffle to its share of target_n, the result is
/// shuffled, and refusal phrases rotate round-robin in output order.
/// Throws DataError when a side is undersupplied, std::invalid_argument when
/// the inputs are misaligned or target_n does not split by the ratio.
std::vector<PreferencePair> build_pairs(std::span<const scenarios::ScenarioSample> samples,
                                        std::span<const Verdict> verdicts, std::span<const std::string> model_outputs,
                                        std::span<const std::string> refusal_phrases, std::size_t target_n,
                                        Balance balance, std::uint64_t seed);

void export_pairs(std::span<const PreferencePair> pairs, const std::filesystem::path& path);
std::vector<PreferencePair> import_pairs(const std::filesystem::path& path);

struct TrainingFile {
  std::string records_jsonl;  // {"prompt_ids", "chosen_ids", "rejected_ids", "origin"} per line
  std::string vocab_json;     // token -> id, ids assigned in first-seen order
};

/// Word-level tokenization of the pairs (text::tokenize under `lang`).
TrainingFile tokenize_for_training(std::span<const PreferencePair> pairs, Language lang);

// ---------------------------------------------------------------------------
// Loss

struct TokenLogProbs {
  std::vector<double> chosen_logps;
  std::vector<double> rejected_logps;
};

void to_json(json& j, const TokenLogProbs& t);
void from_json(const json& j, TokenLogProbs& t);

enum class Reduction { Sum, Mean };

struct LossResult {
  double loss = 0;
  std::vector<double> margins;
  std::vector<std::vector<double>> grad_chosen;
  std::vector<std::vector<double>> grad_rejected;
};

void to_json(json& j, const LossResult& r);

/// log(1 + e^x) without overflow.
template <class T>
T softplus(T x) {
  using std::exp;
  using std::log1p;
  return x > T(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

/// 1 / (1 + e^-x) without overflow.
template <class T>
T sigmoid(T x) {
  using std::exp;
  if (x >= T(0)) return T(1) / (T(1) + exp(-x));
  const T e = exp(x);
  return e / (T(1) + e);
}

/// Margin and loss of one pair in precision T, summed in index order.
template <class T>
T pair_margin(std::span<const double> chosen, std::span<const double> rejected) {
  T sc = 0;
  for (double v : chosen) sc += T(v);
  T sr = 0;
  for (double v : rejected) sr += T(v);
  return sc / T(chosen.size()) - sr / T(rejected.size());
}

template <class T>
T batch_loss(std::span<const TokenLogProbs> batch, Reduction reduction = Reduction::Sum) {
  T total = 0;
  for (const auto& p : batch) total += softplus<T>(-pair_margin<T>(p.chosen_logps, p.rejected_logps));
  return reduction == Reduction::Mean ? total / T(batch.size()) : total;
}

/// Throws std::invalid_argument on an empty batch, an empty token list, or a
/// non-finite or positive log-probability.
void validate_batch(std::span<const TokenLogProbs> batch);

/// Loss and analytic gradients. Within a pair the gradient entries sum to
/// exactly zero: the shared weight sigma(-delta) is rounded to a multiple of
/// lcm(C, R) ulps so that both per-token shares are exact.
LossResult contrastive_loss(std::span<const TokenLogProbs> batch, Reduction reduction = Reduction::Sum);

struct GradientCheck {
  double max_relative_residual = 0;
  double max_absolute_residual = 0;
  std::size_t entries = 0;
};

/// Central differences of the extended-precision loss against the analytic
/// gradients.
GradientCheck finite_difference_check(std::span<const TokenLogProbs> batch, double h = 1e-6,
                                      Reduction reduction = Reduction::Sum);

}  // namespace robustqa::contrastive
