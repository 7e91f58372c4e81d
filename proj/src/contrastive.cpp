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

#include "robustqa/contrastive.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "robustqa/text.hpp"
#include "robustqa/triples.hpp"

namespace robustqa::contrastive {

std::string_view to_string(Origin o) { return o == Origin::FromCorrect ? "from_correct" : "from_incorrect"; }

Origin parse_origin(std::string_view s) {
  if (s == "from_correct") return Origin::FromCorrect;
  if (s == "from_incorrect") return Origin::FromIncorrect;
  throw DataError("unknown pair origin '" + std::string(s) + "'");
}

void to_json(json& j, const PreferencePair& p) {
  j = json{{"prompt", p.prompt}, {"chosen", p.chosen}, {"rejected", p.rejected}, {"origin", to_string(p.origin)}};
}

void from_json(const json& j, PreferencePair& p) {
  p.prompt = require<std::string>(j, "prompt");
  p.chosen = require<std::string>(j, "chosen");
  p.rejected = require<std::string>(j, "rejected");
  p.origin = parse_origin(require<std::string>(j, "origin"));
}

std::vector<std::string> default_refusal_phrases() {
  return {"Provided context is not sufficient to answer the question", "Sorry, I don't have enough information"};
}

std::string render_prompt(const scenarios::ScenarioSample& s) {
  std::string out;
  if (s.context) out += "Context: " + *s.context + "\n";
  if (s.triples) out += "Triples: " + triples::render_triples(*s.triples) + "\n";
  out += "Question: " + s.question;
  return out;
}

namespace {

// Seeded uniform choice of n indices, independent of input order.
std::vector<std::size_t> draw(std::vector<std::size_t> idx, std::size_t n,
                              std::span<const scenarios::ScenarioSample> samples, std::uint64_t seed) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].id != samples[b].id ? samples[a].id < samples[b].id : a < b;
  });
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

}  // namespace

std::vector<PreferencePair> build_pairs(std::span<const scenarios::ScenarioSample> samples,
                                        std::span<const Verdict> verdicts, std::span<const std::string> model_outputs,
                                        std::span<const std::string> refusal_phrases, std::size_t target_n,
                                        Balance balance, std::uint64_t seed) {
  if (verdicts.size() != samples.size() || model_outputs.size() != samples.size()) {
    throw std::invalid_argument("build_pairs: samples, verdicts and outputs differ in length");
  }
  if (refusal_phrases.empty()) throw std::invalid_argument("build_pairs: no refusal phrases");
  const std::size_t parts = balance.correct + balance.incorrect;
  if (parts == 0) throw std::invalid_argument("build_pairs: balance ratio is 0:0");
  if ((target_n * balance.correct) % parts != 0) {
    throw std::invalid_argument("build_pairs: target " + std::to_string(target_n) + " does not split " +
                                std::to_string(balance.correct) + ":" + std::to_string(balance.incorrect));
  }
  const std::size_t want_correct = target_n * balance.correct / parts;
  const std::size_t want_incorrect = target_n - want_correct;

  std::vector<std::size_t> correct;
  std::vector<std::size_t> incorrect;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (verdicts[i] == Verdict::Correct) {
      correct.push_back(i);
    } else if (verdicts[i] == Verdict::Wrong && !text::normalize(model_outputs[i], samples[i].language).empty()) {
      incorrect.push_back(i);
    }
  }
  if (correct.size() < want_correct || incorrect.size() < want_incorrect) {
    throw DataError("build_pairs: need " + std::to_string(want_correct) + " from_correct and " +
                    std::to_string(want_incorrect) + " from_incorrect pairs, have " + std::to_string(correct.size()) +
                    " and " + std::to_string(incorrect.size()));
  }

  struct Pick {
    std::size_t index;
    Origin origin;
  };
  std::vector<Pick> picks;
  for (std::size_t i : draw(correct, want_correct, samples, derive_seed(seed, "from_correct"))) {
    picks.push_back({i, Origin::FromCorrect});
  }
  for (std::size_t i : draw(incorrect, want_incorrect, samples, derive_seed(seed, "from_incorrect"))) {
    picks.push_back({i, Origin::FromIncorrect});
  }
  Rng rng(derive_seed(seed, "merge"));
  for (std::size_t i = picks.size(); i > 1; --i) {
    std::swap(picks[i - 1], picks[static_cast<std::size_t>(rng.below(i))]);
  }

  std::vector<PreferencePair> out;
  out.reserve(picks.size());
  for (std::size_t k = 0; k < picks.size(); ++k) {
    const auto& s = samples[picks[k].index];
    const std::string& refusal = refusal_phrases[k % refusal_phrases.size()];
    PreferencePair p;
    p.prompt = render_prompt(s);
    p.origin = picks[k].origin;
    if (p.origin == Origin::FromCorrect) {
      p.chosen = s.gold_answer;
      p.rejected = refusal;
    } else {
      p.chosen = refusal;
      p.rejected = model_outputs[picks[k].index];
    }
    out.push_back(std::move(p));
  }
  return out;
}

void export_pairs(std::span<const PreferencePair> pairs, const std::filesystem::path& path) {
  write_jsonl(path, std::vector<PreferencePair>(pairs.begin(), pairs.end()));
}

std::vector<PreferencePair> import_pairs(const std::filesystem::path& path) {
  return read_jsonl<PreferencePair>(path);
}

TrainingFile tokenize_for_training(std::span<const PreferencePair> pairs, Language lang) {
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  std::unordered_map<std::string, std::size_t> ids;
  auto encode = [&](const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& tok : text::tokenize(s, lang).tokens) {
      auto [it, fresh] = ids.emplace(tok, ids.size());
      if (fresh) vocab[tok] = it->second;
      out.push_back(it->second);
    }
    return out;
  };
  TrainingFile tf;
  for (const auto& p : pairs) {
    json rec{{"prompt_ids", encode(p.prompt)},
             {"chosen_ids", encode(p.chosen)},
             {"rejected_ids", encode(p.rejected)},
             {"origin", to_string(p.origin)}};
    tf.records_jsonl += rec.dump() + "\n";
  }
  tf.vocab_json = vocab.dump(2) + "\n";
  return tf;
}

// ---------------------------------------------------------------------------
// Loss

void to_json(json& j, const TokenLogProbs& t) {
  j = json{{"chosen_logps", t.chosen_logps}, {"rejected_logps", t.rejected_logps}};
}

void from_json(const json& j, TokenLogProbs& t) {
  t.chosen_logps = require<std::vector<double>>(j, "chosen_logps");
  t.rejected_logps = require<std::vector<double>>(j, "rejected_logps");
}

void to_json(json& j, const LossResult& r) {
  j = json{{"loss", r.loss}, {"margins", r.margins}, {"grad_chosen", r.grad_chosen}, {"grad_rejected", r.grad_rejected}};
}

void validate_batch(std::span<const TokenLogProbs> batch) {
  if (batch.empty()) throw std::invalid_argument("contrastive_loss: empty batch");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& p = batch[i];
    if (p.chosen_logps.empty() || p.rejected_logps.empty()) {
      throw std::invalid_argument("contrastive_loss: pair " + std::to_string(i) + " has an empty token list");
    }
    for (const auto* side : {&p.chosen_logps, &p.rejected_logps}) {
      for (double v : *side) {
        if (!std::isfinite(v) || v > 0) {
          throw std::invalid_argument("contrastive_loss: pair " + std::to_string(i) +
                                      " has a log-probability that is not finite and <= 0");
        }
      }
    }
  }
}

namespace {

struct Shares {
  double chosen;    // per chosen token, <= 0
  double rejected;  // per rejected token, >= 0
};

// Splits weight w over C chosen and R rejected tokens. When lcm(C, R) is small
// enough, w is rounded to k * lcm * 2^-e so that w/C and w/R are exact and any
// summation order of the C + R entries gives exactly 0.
Shares split_weight(double w, std::size_t c, std::size_t r) {
  constexpr std::uint64_t kMaxLcm = std::uint64_t{1} << 30;
  const std::uint64_t l = std::lcm<std::uint64_t>(c, r);
  if (!(w > 0)) return {0.0, 0.0};
  if (l > kMaxLcm) return {-w / static_cast<double>(c), w / static_cast<double>(r)};
  int x = 0;
  std::frexp(w, &x);
  if (x < -960) return {0.0, 0.0};
  const int e = 52 - x;  // w * 2^e in [2^51, 2^52)
  const double k = std::nearbyint(std::ldexp(w, e) / static_cast<double>(l));
  const double mc = k * static_cast<double>(l / c);
  const double mr = k * static_cast<double>(l / r);
  return {-std::ldexp(mc, -e), std::ldexp(mr, -e)};
}

}  // namespace

LossResult contrastive_loss(std::span<const TokenLogProbs> batch, Reduction reduction) {
  validate_batch(batch);
  const double scale = reduction == Reduction::Mean ? 1.0 / static_cast<double>(batch.size()) : 1.0;
  LossResult out;
  out.margins.reserve(batch.size());
  double total = 0;
  for (const auto& p : batch) {
    const double delta = pair_margin<double>(p.chosen_logps, p.rejected_logps);
    out.margins.push_back(delta);
    total += softplus(-delta);
    const Shares s = split_weight(sigmoid(-delta) * scale, p.chosen_logps.size(), p.rejected_logps.size());
    out.grad_chosen.emplace_back(p.chosen_logps.size(), s.chosen);
    out.grad_rejected.emplace_back(p.rejected_logps.size(), s.rejected);
  }
  out.loss = total * scale;
  return out;
}

GradientCheck finite_difference_check(std::span<const TokenLogProbs> batch, double h, Reduction reduction) {
  const LossResult analytic = contrastive_loss(batch, reduction);
  const long double scale = reduction == Reduction::Mean ? 1.0L / static_cast<long double>(batch.size()) : 1.0L;
  GradientCheck check;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    TokenLogProbs p = batch[i];
    auto probe = [&](std::vector<double>& side, const std::vector<double>& grads) {
      for (std::size_t k = 0; k < side.size(); ++k) {
        const double x = side[k];
        const double xp = x + h;
        const double xm = x - h;
        side[k] = xp;
        const long double lp = softplus<long double>(-pair_margin<long double>(p.chosen_logps, p.rejected_logps));
        side[k] = xm;
        const long double lm = softplus<long double>(-pair_margin<long double>(p.chosen_logps, p.rejected_logps));
        side[k] = x;
        const double numeric =
            static_cast<double>(scale * (lp - lm) / (static_cast<long double>(xp) - static_cast<long double>(xm)));
        const double a = grads[k];
        const double abs_res = std::fabs(a - numeric);
        const double mag = std::max(std::fabs(a), std::fabs(numeric));
        check.max_absolute_residual = std::max(check.max_absolute_residual, abs_res);
        if (mag > 0) check.max_relative_residual = std::max(check.max_relative_residual, abs_res / mag);
        ++check.entries;
      }
    };
    probe(p.chosen_logps, analytic.grad_chosen[i]);
    probe(p.rejected_logps, analytic.grad_rejected[i]);
  }
  return check;
}

}  // namespace robustqa::contrastive
