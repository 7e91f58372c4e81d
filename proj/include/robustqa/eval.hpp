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

// Scoring of model outputs: token-overlap recall, rule-based verdicts,
// W/C/R aggregation into ACC and WSCORE, and Table-1-style reports.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustqa/clients.hpp"
#include "robustqa/common.hpp"
#include "robustqa/jsonl.hpp"
#include "robustqa/scenarios.hpp"
#include "robustqa/verdict.hpp"

namespace robustqa::eval {

using scenarios::Scenario;

enum class RecallMode { Set, Multiset };

/// Set: |tokens(label) ∩ tokens(output)| / |tokens(label)| over distinct tokens.
/// Multiset: clipped token counts over the label length.
/// Throws std::invalid_argument when the label has no tokens.
double recall(std::string_view output, std::string_view label, Language lang, RecallMode mode = RecallMode::Set);

std::vector<std::string> default_rejection_phrases();

/// Rejected if the output contains a rejection phrase, Correct if it contains
/// the label, Wrong otherwise (normalized containment throughout).
Verdict rule_judge(std::string_view output, std::string_view label, Language lang,
                   std::span<const std::string> rejection_phrases);

struct VerdictCounts {
  std::size_t wrong = 0;
  std::size_t correct = 0;
  std::size_t rejected = 0;

  std::size_t n() const { return wrong + correct + rejected; }
  void add(Verdict v);
  bool operator==(const VerdictCounts&) const = default;
};

struct ScenarioMetrics {
  Scenario scenario = Scenario::SS;
  std::size_t n = 0;
  double w = 0;
  double c = 0;
  double r = 0;
  double acc = 0;
  double wscore = 0;
  std::optional<double> mean_recall;

  bool operator==(const ScenarioMetrics&) const = default;
};

/// Throws DataError when counts.n() == 0.
ScenarioMetrics metrics_from_counts(Scenario s, const VerdictCounts& counts,
                                    std::optional<double> mean_recall = std::nullopt);

struct EvalReport {
  std::string model;
  std::string judge;
  std::vector<ScenarioMetrics> scenarios;  // canonical scenario order
  double overall_acc = 0;
  double overall_wscore = 0;

  bool operator==(const EvalReport&) const = default;
};

void to_json(json& j, const EvalReport& r);
void from_json(const json& j, EvalReport& r);

/// Per-scenario metrics and their unweighted mean. Errors on an empty input
/// or an empty scenario.
EvalReport aggregate(const std::map<Scenario, VerdictCounts>& counts, const std::string& model = "",
                     const std::string& judge = "", const std::map<Scenario, double>& mean_recall = {});
EvalReport aggregate(const std::map<Scenario, std::vector<Verdict>>& verdicts, const std::string& model = "",
                     const std::string& judge = "");

/// Per-scenario percentages (W, C, R), each summing to 100, turned into counts
/// out of 1000 (one decimal of precision).
VerdictCounts counts_from_percentages(double w, double c, double r);

enum class ReportFormat { Text, Json };
std::string render_report(const EvalReport& report, ReportFormat format);
std::string render_reports(std::span<const EvalReport> reports, ReportFormat format);

/// {"rows": [{"model", "judge"?, "scenarios": {"SS": {"acc", "r"} | {"w", "c", "r"}, ...}}]}
/// in percent; a missing "w" is 100 - acc - r.
std::vector<EvalReport> reports_from_rates(const json& fixture);

// ---------------------------------------------------------------------------
// Judging a batch of model outputs

struct ModelOutput {
  std::string sample_id;
  Scenario scenario = Scenario::SS;
  std::string model_output;
};

void to_json(json& j, const ModelOutput& o);
void from_json(const json& j, ModelOutput& o);

struct JudgedOutput {
  std::string sample_id;
  Scenario scenario = Scenario::SS;
  std::string model_output;
  Verdict verdict = Verdict::Wrong;
  double recall = 0;

  bool operator==(const JudgedOutput&) const = default;
};

void to_json(json& j, const JudgedOutput& o);
void from_json(const json& j, JudgedOutput& o);

enum class JudgeKind { Rule, Llm };

struct EvalOptions {
  JudgeKind judge = JudgeKind::Rule;
  std::vector<std::string> rejection_phrases = default_rejection_phrases();
  RecallMode recall_mode = RecallMode::Set;
};

/// Joins outputs to samples by id and judges each. Unknown sample ids raise
/// DataError naming the id. The LLM judge needs `ctx`.
std::vector<JudgedOutput> judge_outputs(std::span<const scenarios::ScenarioSample> samples,
                                        std::span<const ModelOutput> outputs, const EvalOptions& options,
                                        clients::ClientContext* ctx);

EvalReport aggregate(std::span<const JudgedOutput> judged, const std::string& model, const std::string& judge);

}  // namespace robustqa::eval
