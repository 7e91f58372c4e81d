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

#include "robustqa/eval.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "robustqa/text.hpp"

namespace robustqa::eval {

double recall(std::string_view output, std::string_view label, Language lang, RecallMode mode) {
  const auto label_tokens = text::tokenize(label, lang).tokens;
  if (label_tokens.empty()) throw std::invalid_argument("recall: label has no tokens");
  const auto output_tokens = text::tokenize(output, lang).tokens;
  if (mode == RecallMode::Set) {
    const std::unordered_set<std::string> want(label_tokens.begin(), label_tokens.end());
    const std::unordered_set<std::string> have(output_tokens.begin(), output_tokens.end());
    std::size_t hit = 0;
    for (const auto& t : want) hit += have.count(t);
    return static_cast<double>(hit) / static_cast<double>(want.size());
  }
  std::unordered_map<std::string, std::size_t> have;
  for (const auto& t : output_tokens) ++have[t];
  std::size_t hit = 0;
  for (const auto& t : label_tokens) {
    auto it = have.find(t);
    if (it != have.end() && it->second > 0) {
      --it->second;
      ++hit;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(label_tokens.size());
}

std::vector<std::string> default_rejection_phrases() {
  return {"Provided context is not sufficient to answer the question", "Sorry, I don't have enough information"};
}

Verdict rule_judge(std::string_view output, std::string_view label, Language lang,
                   std::span<const std::string> rejection_phrases) {
  if (text::normalize(output, lang).empty()) return Verdict::Wrong;
  for (const auto& phrase : rejection_phrases) {
    if (!text::normalize(phrase, lang).empty() && text::contains_answer(output, phrase, lang)) return Verdict::Rejected;
  }
  if (text::normalize(label, lang).empty()) return Verdict::Wrong;
  return text::contains_answer(output, label, lang) ? Verdict::Correct : Verdict::Wrong;
}

void VerdictCounts::add(Verdict v) {
  switch (v) {
    case Verdict::Wrong:
      ++wrong;
      break;
    case Verdict::Correct:
      ++correct;
      break;
    case Verdict::Rejected:
      ++rejected;
      break;
  }
}

ScenarioMetrics metrics_from_counts(Scenario s, const VerdictCounts& counts, std::optional<double> mean_recall) {
  if (counts.n() == 0) throw DataError("scenario " + std::string(scenarios::to_string(s)) + " has no verdicts");
  ScenarioMetrics m;
  m.scenario = s;
  m.n = counts.n();
  const double n = static_cast<double>(m.n);
  m.w = static_cast<double>(counts.wrong) / n;
  m.c = static_cast<double>(counts.correct) / n;
  m.r = static_cast<double>(counts.rejected) / n;
  m.acc = m.c;
  m.wscore = (static_cast<double>(counts.correct) - static_cast<double>(counts.wrong)) / n;
  m.mean_recall = mean_recall;
  return m;
}

EvalReport aggregate(const std::map<Scenario, VerdictCounts>& counts, const std::string& model,
                     const std::string& judge, const std::map<Scenario, double>& mean_recall) {
  if (counts.empty()) throw DataError("aggregate: no scenarios");
  EvalReport report;
  report.model = model;
  report.judge = judge;
  double acc = 0;
  double wscore = 0;
  for (const auto& [s, c] : counts) {
    std::optional<double> rec;
    if (auto it = mean_recall.find(s); it != mean_recall.end()) rec = it->second;
    report.scenarios.push_back(metrics_from_counts(s, c, rec));
    acc += report.scenarios.back().acc;
    wscore += report.scenarios.back().wscore;
  }
  const double k = static_cast<double>(report.scenarios.size());
  report.overall_acc = acc / k;
  report.overall_wscore = wscore / k;
  return report;
}

EvalReport aggregate(const std::map<Scenario, std::vector<Verdict>>& verdicts, const std::string& model,
                     const std::string& judge) {
  std::map<Scenario, VerdictCounts> counts;
  for (const auto& [s, vs] : verdicts) {
    auto& c = counts[s];
    for (Verdict v : vs) c.add(v);
  }
  return aggregate(counts, model, judge);
}

VerdictCounts counts_from_percentages(double w, double c, double r) {
  auto tenths = [](double p, const char* what) {
    if (!std::isfinite(p) || p < -1e-9 || p > 100 + 1e-9) {
      throw DataError(std::string("percentage ") + what + " out of range: " + std::to_string(p));
    }
    return static_cast<std::size_t>(std::llround(p * 10));
  };
  VerdictCounts out{tenths(w, "W"), tenths(c, "C"), tenths(r, "R")};
  if (out.n() != 1000) {
    throw DataError("percentages W/C/R sum to " + std::to_string(w + c + r) + ", expected 100");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json metrics_json(const ScenarioMetrics& m) {
  json j{{"scenario", scenarios::to_string(m.scenario)},
         {"n", m.n},
         {"w", m.w},
         {"c", m.c},
         {"r", m.r},
         {"acc", m.acc},
         {"wscore", m.wscore}};
  j["mean_recall"] = m.mean_recall ? json(*m.mean_recall) : json(nullptr);
  return j;
}

ScenarioMetrics metrics_from_json(const json& j) {
  ScenarioMetrics m;
  m.scenario = scenarios::parse_scenario(require<std::string>(j, "scenario"));
  m.n = require<std::size_t>(j, "n");
  m.w = require<double>(j, "w");
  m.c = require<double>(j, "c");
  m.r = require<double>(j, "r");
  m.acc = require<double>(j, "acc");
  m.wscore = require<double>(j, "wscore");
  if (j.contains("mean_recall") && !j["mean_recall"].is_null()) m.mean_recall = j["mean_recall"].get<double>();
  return m;
}

}  // namespace

void to_json(json& j, const EvalReport& r) {
  json scen = json::array();
  for (const auto& m : r.scenarios) scen.push_back(metrics_json(m));
  j = json{{"model", r.model},
           {"judge", r.judge},
           {"scenarios", scen},
           {"overall", {{"acc", r.overall_acc}, {"wscore", r.overall_wscore}}}};
}

void from_json(const json& j, EvalReport& r) {
  r.model = j.value("model", "");
  r.judge = j.value("judge", "");
  r.scenarios.clear();
  for (const auto& m : require<json>(j, "scenarios")) r.scenarios.push_back(metrics_from_json(m));
  const json& overall = require<json>(j, "overall");
  r.overall_acc = require<double>(overall, "acc");
  r.overall_wscore = require<double>(overall, "wscore");
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x * 100.0);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string display_name(const std::string& model) { return model.empty() ? "(unnamed)" : model; }

}  // namespace

std::string render_reports(std::span<const EvalReport> reports, ReportFormat format) {
  if (format == ReportFormat::Json) {
    if (reports.size() == 1) return json(reports[0]).dump(2) + "\n";
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r);
    return arr.dump(2) + "\n";
  }
  // Column set: union of scenarios present, canonical order.
  std::vector<Scenario> cols;
  for (Scenario s : scenarios::kAllScenarios) {
    for (const auto& r : reports) {
      if (std::any_of(r.scenarios.begin(), r.scenarios.end(), [&](const auto& m) { return m.scenario == s; })) {
        cols.push_back(s);
        break;
      }
    }
  }
  std::size_t name_w = 5;
  for (const auto& r : reports) name_w = std::max(name_w, display_name(r.model).size());
  name_w += 2;
  constexpr std::size_t kCell = 7;

  std::string out;
  std::string head1 = pad("", name_w);
  std::string head2 = pad("Model", name_w);
  for (Scenario s : cols) {
    head1 += pad(std::string(scenarios::to_string(s)), 2 * kCell);
    head2 += lpad("ACC", kCell - 1) + ' ' + lpad("R", kCell - 1) + ' ';
  }
  head1 += "Overall";
  head2 += lpad("ACC", kCell - 1) + ' ' + lpad("WSCORE", kCell);
  out += head1 + "\n" + head2 + "\n";
  for (const auto& r : reports) {
    std::string row = pad(display_name(r.model), name_w);
    for (Scenario s : cols) {
      auto it = std::find_if(r.scenarios.begin(), r.scenarios.end(), [&](const auto& m) { return m.scenario == s; });
      if (it == r.scenarios.end()) {
        row += lpad("-", kCell - 1) + ' ' + lpad("-", kCell - 1) + ' ';
      } else {
        row += lpad(pct(it->acc), kCell - 1) + ' ' + lpad(pct(it->r), kCell - 1) + ' ';
      }
    }
    row += lpad(pct(r.overall_acc), kCell - 1) + ' ' + lpad(pct(r.overall_wscore), kCell);
    out += row + "\n";
  }
  std::string judges;
  for (const auto& r : reports) {
    if (!r.judge.empty() && judges.find(r.judge) == std::string::npos) judges += (judges.empty() ? "" : ", ") + r.judge;
  }
  if (!judges.empty()) out += "judge: " + judges + "\n";
  return out;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return render_reports(std::span(&report, 1), format);
  return "Model: " + display_name(report.model) + "\n" + render_reports(std::span(&report, 1), format);
}

std::vector<EvalReport> reports_from_rates(const json& fixture) {
  std::vector<EvalReport> out;
  const json& rows = require<json>(fixture, "rows");
  if (!rows.is_array() || rows.empty()) throw DataError("rates fixture: 'rows' must be a non-empty array");
  for (const auto& row : rows) {
    const std::string model = row.value("model", "");
    std::map<Scenario, VerdictCounts> counts;
    const json cells = require<json>(row, "scenarios");
    for (const auto& [name, cell] : cells.items()) {
      const Scenario s = scenarios::parse_scenario(name);
      const double r = require<double>(cell, "r");
      double c = 0;
      if (cell.contains("c")) {
        c = cell["c"].get<double>();
      } else {
        c = require<double>(cell, "acc");
      }
      const double w = cell.contains("w") ? cell["w"].get<double>() : 100.0 - c - r;
      try {
        counts[s] = counts_from_percentages(w, c, r);
      } catch (const DataError& e) {
        throw DataError("rates fixture, model '" + model + "', " + name + ": " + e.what());
      }
    }
    out.push_back(aggregate(counts, model, row.value("judge", "")));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch judging

void to_json(json& j, const ModelOutput& o) {
  j = json{{"sample_id", o.sample_id}, {"scenario", scenarios::to_string(o.scenario)}, {"model_output", o.model_output}};
}

void from_json(const json& j, ModelOutput& o) {
  o.sample_id = require<std::string>(j, "sample_id");
  o.scenario = scenarios::parse_scenario(require<std::string>(j, "scenario"));
  o.model_output = require<std::string>(j, "model_output");
}

void to_json(json& j, const JudgedOutput& o) {
  j = json{{"sample_id", o.sample_id},
           {"scenario", scenarios::to_string(o.scenario)},
           {"model_output", o.model_output},
           {"verdict", to_string(o.verdict)},
           {"recall", o.recall}};
}

void from_json(const json& j, JudgedOutput& o) {
  o.sample_id = require<std::string>(j, "sample_id");
  o.scenario = scenarios::parse_scenario(require<std::string>(j, "scenario"));
  o.model_output = require<std::string>(j, "model_output");
  o.verdict = parse_verdict(require<std::string>(j, "verdict"));
  o.recall = j.value("recall", 0.0);
}

std::vector<JudgedOutput> judge_outputs(std::span<const scenarios::ScenarioSample> samples,
                                        std::span<const ModelOutput> outputs, const EvalOptions& options,
                                        clients::ClientContext* ctx) {
  if (options.judge == JudgeKind::Llm && ctx == nullptr) throw ConfigError("the LLM judge needs a completion client");
  std::unordered_map<std::string, const scenarios::ScenarioSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.id, &s);
  std::vector<JudgedOutput> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) {
    auto it = by_id.find(o.sample_id);
    if (it == by_id.end()) throw DataError("model output for unknown sample '" + o.sample_id + "'");
    const auto& s = *it->second;
    if (s.scenario != o.scenario) {
      throw DataError("model output for '" + o.sample_id + "' names scenario " +
                      std::string(scenarios::to_string(o.scenario)) + ", sample is " +
                      std::string(scenarios::to_string(s.scenario)));
    }
    JudgedOutput j;
    j.sample_id = o.sample_id;
    j.scenario = o.scenario;
    j.model_output = o.model_output;
    if (options.judge == JudgeKind::Rule || o.model_output.empty()) {
      j.verdict = rule_judge(o.model_output, s.gold_answer, s.language, options.rejection_phrases);
    } else {
      j.verdict = clients::judge(*ctx, s.question, s.gold_answer, o.model_output, s.language);
    }
    j.recall = recall(o.model_output, s.gold_answer, s.language, options.recall_mode);
    out.push_back(std::move(j));
  }
  return out;
}

EvalReport aggregate(std::span<const JudgedOutput> judged, const std::string& model, const std::string& judge) {
  std::map<Scenario, VerdictCounts> counts;
  std::map<Scenario, double> recall_sum;
  for (const auto& j : judged) {
    counts[j.scenario].add(j.verdict);
    recall_sum[j.scenario] += j.recall;
  }
  std::map<Scenario, double> mean_recall;
  for (const auto& [s, c] : counts) mean_recall[s] = recall_sum[s] / static_cast<double>(c.n());
  return aggregate(counts, model, judge, mean_recall);
}

}  // namespace robustqa::eval
