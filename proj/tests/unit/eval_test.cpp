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

#include <gtest/gtest.h>

#include <cmath>

#include "robustqa/eval.hpp"
#include "support/synthetic.hpp"

namespace robustqa::eval {
namespace {

const auto kPhrases = default_rejection_phrases();

TEST(Recall, SetAndMultiset) {
  EXPECT_DOUBLE_EQ(recall("It is Magdalen Tower.", "Magdalen Tower", Language::English), 1.0);
  EXPECT_DOUBLE_EQ(recall("a tower", "Magdalen Tower", Language::English), 0.5);
  EXPECT_DOUBLE_EQ(recall("new", "New New York", Language::English, RecallMode::Set), 0.5);
  EXPECT_NEAR(recall("new", "New New York", Language::English, RecallMode::Multiset), 1.0 / 3, 1e-12);
  EXPECT_THROW(recall("x", "  ", Language::English), std::invalid_argument);
}

TEST(Recall, BoundedAndMonotone) {
  Rng rng(4);
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "eps"};
  for (int i = 0; i < 500; ++i) {
    std::string label, out;
    for (int k = 0; k < 3; ++k) label += words[rng.below(words.size())] + " ";
    for (int k = 0; k < 3; ++k) out += words[rng.below(words.size())] + " ";
    const double r = recall(out, label, Language::English);
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 1.0);
    ASSERT_GE(recall(out + " " + words[rng.below(words.size())], label, Language::English), r);
    ASSERT_DOUBLE_EQ(recall(label, label, Language::English), 1.0);
  }
}

TEST(RuleJudge, Verdicts) {
  EXPECT_EQ(rule_judge("The answer is Magdalen Tower", "Magdalen Tower", Language::English, kPhrases),
            Verdict::Correct);
  EXPECT_EQ(rule_judge("Bodleian Library", "Magdalen Tower", Language::English, kPhrases), Verdict::Wrong);
  EXPECT_EQ(rule_judge("Sorry, I don't have enough information.", "Magdalen Tower", Language::English, kPhrases),
            Verdict::Rejected);
  EXPECT_EQ(rule_judge("", "Magdalen Tower", Language::English, kPhrases), Verdict::Wrong);
  // A refusal that names the answer still counts as a refusal.
  EXPECT_EQ(rule_judge("Provided context is not sufficient to answer the question; maybe Magdalen Tower",
                       "Magdalen Tower", Language::English, kPhrases),
            Verdict::Rejected);
}

TEST(Metrics, FromCounts) {
  const auto m = metrics_from_counts(Scenario::SS, {1, 7, 2});
  EXPECT_EQ(m.n, 10u);
  EXPECT_DOUBLE_EQ(m.acc, 0.7);
  EXPECT_DOUBLE_EQ(m.r, 0.2);
  EXPECT_DOUBLE_EQ(m.wscore, 0.6);
  EXPECT_THROW(metrics_from_counts(Scenario::SS, {}), DataError);
}

TEST(Metrics, RandomCountsMatchDefinition) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    VerdictCounts c{rng.below(50), rng.below(50), rng.below(50)};
    if (c.n() == 0) continue;
    const auto m = metrics_from_counts(Scenario::MSConf, c);
    const double n = static_cast<double>(c.n());
    ASSERT_NEAR(m.w + m.c + m.r, 1.0, 1e-12);
    ASSERT_NEAR(m.wscore, (1.0 * c.correct + 0.0 * c.rejected - 1.0 * c.wrong) / n, 1e-12);
    ASSERT_GE(m.wscore, -1.0);
    ASSERT_LE(m.wscore, m.acc);
  }
}

TEST(Aggregate, OverallIsUnweightedMean) {
  std::map<Scenario, VerdictCounts> counts{{Scenario::SS, {0, 10, 0}}, {Scenario::SSIncomp, {50, 50, 0}}};
  const auto r = aggregate(counts, "m", "rule");
  ASSERT_EQ(r.scenarios.size(), 2u);
  EXPECT_DOUBLE_EQ(r.overall_acc, 0.75);
  EXPECT_DOUBLE_EQ(r.overall_wscore, 0.5);
  EXPECT_THROW(aggregate(std::map<Scenario, VerdictCounts>{}), DataError);
  EXPECT_EQ(json(r).get<EvalReport>(), r);
}

TEST(Percentages, ToCounts) {
  EXPECT_EQ(counts_from_percentages(3.3, 96.7, 0.0), (VerdictCounts{33, 967, 0}));
  EXPECT_THROW(counts_from_percentages(50, 40, 5), std::exception);
}

json published_rows() {
  auto row = [](const std::string& model, std::vector<double> v) {
    json sc = json::object();
    const char* names[] = {"SS", "SSIncomp", "MSCons", "MSIncons", "MSConf"};
    for (int i = 0; i < 5; ++i) sc[names[i]] = {{"acc", v[2 * i]}, {"r", v[2 * i + 1]}};
    return json{{"model", model}, {"scenarios", sc}};
  };
  return {{"rows",
           {row("GPT3.5-Turbo", {96.7, 0.0, 60.0, 3.3, 95.9, 0.6, 93.9, 1.6, 72.4, 0.8}),
            row("Baichuan2-13B-Chat", {93.9, 0.4, 48.8, 20.5, 90.2, 0.6, 88.2, 3.5, 70.7, 0.8})}}};
}

TEST(Rates, TableOneOverallColumns) {
  const auto reports = reports_from_rates(published_rows());
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(reports[0].overall_acc * 100, 83.8, 0.1);
  EXPECT_NEAR(reports[0].overall_wscore * 100, 68.8, 0.1);
  EXPECT_NEAR(reports[1].overall_acc * 100, 78.3, 0.1);
  EXPECT_NEAR(reports[1].overall_wscore * 100, 61.9, 0.1);
}

TEST(Rates, WcrRowsForWscore) {
  json sc = json::object();
  const char* names[] = {"SS", "SSIncomp", "MSCons", "MSIncons", "MSConf"};
  const double v[] = {3.7, 93.9, 2.4, 29.3, 46.9, 23.8, 7.7, 91.3, 1.0, 9.6, 87.6, 2.8, 31.5, 67.7, 0.8};
  for (int i = 0; i < 5; ++i) sc[names[i]] = {{"w", v[3 * i]}, {"c", v[3 * i + 1]}, {"r", v[3 * i + 2]}};
  const auto reports = reports_from_rates({{"rows", {{{"model", "Baichuan2-13B-Chat"}, {"scenarios", sc}}}}});
  EXPECT_NEAR(reports[0].overall_wscore * 100, 61.1, 0.1);
}

TEST(Render, TextTable) {
  const auto reports = reports_from_rates(published_rows());
  const auto text = render_reports(reports, ReportFormat::Text);
  EXPECT_NE(text.find("SSIncomp"), std::string::npos);
  EXPECT_NE(text.find("Overall"), std::string::npos);
  EXPECT_NE(text.find("GPT3.5-Turbo"), std::string::npos);
  EXPECT_NE(text.find("83.8"), std::string::npos);
  EXPECT_NE(text.find("68.8"), std::string::npos);
  EXPECT_NE(text.find("61.9"), std::string::npos);
  const auto js = json::parse(render_reports(reports, ReportFormat::Json));
  ASSERT_TRUE(js.is_array());
  EXPECT_EQ(js[1]["model"], "Baichuan2-13B-Chat");
  EXPECT_EQ(render_report(reports[0], ReportFormat::Text).rfind("Model: GPT3.5-Turbo\n", 0), 0u);
}

TEST(JudgeOutputs, RuleJudgeMatchesIntent) {
  const auto syn = robustqa::testing::make_synthetic({60, 3, false});
  std::vector<scenarios::ScenarioSample> samples;
  for (const auto& r : syn.records) samples.push_back(scenarios::build_ss(r));
  const auto mo = robustqa::testing::make_model_outputs(samples, 5);
  std::vector<ModelOutput> outputs;
  for (std::size_t i = 0; i < samples.size(); ++i) outputs.push_back({samples[i].id, samples[i].scenario, mo.outputs[i]});
  const auto judged = judge_outputs(samples, outputs, {}, nullptr);
  ASSERT_EQ(judged.size(), samples.size());
  for (std::size_t i = 0; i < judged.size(); ++i) EXPECT_EQ(judged[i].verdict, mo.intended[i]) << mo.outputs[i];
  const auto report = aggregate(judged, "m", "rule");
  ASSERT_TRUE(report.scenarios[0].mean_recall.has_value());
  outputs.push_back({"missing#SS", Scenario::SS, "x"});
  EXPECT_THROW(judge_outputs(samples, outputs, {}, nullptr), DataError);
  outputs.back() = {samples[0].id, Scenario::MSConf, "x"};
  EXPECT_THROW(judge_outputs(samples, outputs, {}, nullptr), DataError);
  EvalOptions llm;
  llm.judge = JudgeKind::Llm;
  EXPECT_THROW(judge_outputs(samples, outputs, llm, nullptr), ConfigError);
}

TEST(JudgeOutputs, LlmJudgeUsesClient) {
  const auto r = robustqa::testing::mitchell_tower();
  const std::vector<scenarios::ScenarioSample> samples{scenarios::build_ss(r)};
  const std::vector<ModelOutput> outputs{{samples[0].id, Scenario::SS, "Bodleian Library"}};
  clients::MockCompletionClient mock;
  mock.add(clients::templates::kJudge, std::nullopt, {"WRONG", false, false});
  const auto tpl = clients::TemplateSet::defaults();
  clients::ClientContext ctx{mock, tpl, {1, std::chrono::milliseconds(0), 2.0}};
  EvalOptions opts;
  opts.judge = JudgeKind::Llm;
  EXPECT_EQ(judge_outputs(samples, outputs, opts, &ctx).at(0).verdict, Verdict::Wrong);
  EXPECT_EQ(mock.calls(), 1u);
}

}  // namespace
}  // namespace robustqa::eval
