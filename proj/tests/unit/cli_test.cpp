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

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>

#include "robustqa/contrastive.hpp"
#include "support/pipeline.hpp"

namespace robustqa::testing {
namespace {

namespace fs = std::filesystem;

int exit_code_of(const std::string& args) {
  const std::string cmd = std::string(ROBUSTQA_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_temp_dir("cli-exit");
  EXPECT_EQ(exit_code_of("--help"), 0);
  EXPECT_EQ(exit_code_of(""), 1);
  EXPECT_EQ(exit_code_of("frobnicate"), 1);
  EXPECT_EQ(exit_code_of("split --records x.jsonl"), 1);
  write_text_file(dir / "bad.json", R"({"seeds": {"split": 1}})");
  EXPECT_EQ(exit_code_of("--config " + (dir / "bad.json").string() + " config"), 2);
  write_text_file(dir / "broken.jsonl", "{\"id\": 1\n");
  EXPECT_EQ(exit_code_of("split --seed 1 --n 2 --records " + (dir / "broken.jsonl").string() + " --out-dir " +
                         (dir / "s").string()),
            3);
}

TEST(Cli, SplitWithoutSeedIsConfigError) {
  const auto r = run_cli({"split", "--records", "none.jsonl", "--out-dir", "x"});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, ConfigEchoRoundTrips) {
  const auto dir = fresh_temp_dir("cli-config");
  write_text_file(dir / "c.json", R"({"seeds": {"split": 1, "augment": 2, "review": 3, "pairs": 4}})");
  const auto r = run_cli({"--config", (dir / "c.json").string(), "config"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto echo = json::parse(r.out);
  EXPECT_EQ(echo["seeds"]["pairs"], 4);
  write_text_file(dir / "echo.json", r.out);
  const auto again = run_cli({"--config", (dir / "echo.json").string(), "config"});
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, ConfigWithoutFilePrintsLoadableDefaults) {
  const auto dir = fresh_temp_dir("cli-config-defaults");
  const auto r = run_cli({"config"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto echo = json::parse(r.out);
  EXPECT_EQ(echo["clients"]["mode"], "mock");
  write_text_file(dir / "defaults.json", r.out);
  const auto again = run_cli({"--config", (dir / "defaults.json").string(), "config"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, LossCheckReportsResidual) {
  const auto dir = fresh_temp_dir("cli-loss");
  write_text_file(dir / "batch.json", R"([{"chosen_logps": [-1.0, -2.0], "rejected_logps": [-1.5]}])");
  const auto r = run_cli({"loss-check", "--batch", (dir / "batch.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_NEAR(j["loss"].get<double>(), std::log(2.0), 1e-12);
}

TEST(Cli, ReportFromRates) {
  const auto dir = fresh_temp_dir("cli-report");
  write_text_file(dir / "rates.json",
                  R"({"rows": [{"model": "GPT3.5-Turbo", "scenarios": {"SS": {"acc": 96.7, "r": 0.0},
                      "SSIncomp": {"acc": 60.0, "r": 3.3}, "MSCons": {"acc": 95.9, "r": 0.6},
                      "MSIncons": {"acc": 93.9, "r": 1.6}, "MSConf": {"acc": 72.4, "r": 0.8}}}]})");
  const auto r = run_cli({"report", "--from", (dir / "rates.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("83.8"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("68.8"), std::string::npos) << r.out;
}

TEST(Cli, FullPipelineOnSmallCorpus) {
  const auto root = fresh_temp_dir("cli-pipeline");
  const auto syn = make_synthetic({80, 4, true});
  const auto inputs = write_pipeline_inputs(root / "inputs", syn, 40, 10);
  const auto run = run_pipeline(inputs, root / "run");
  ASSERT_TRUE(run.ok()) << run.failure();
  EXPECT_EQ(run.commands.size(), 7u);
  const auto dev = read_jsonl<QARecord>(root / "run" / "split" / "dev.jsonl");
  EXPECT_EQ(dev.size(), 20u);
  EXPECT_TRUE(fs::exists(root / "run" / "scenarios" / "synthetic" / "test" / "MSConf.jsonl"));
  EXPECT_TRUE(fs::exists(root / "run" / "eval" / "report.txt"));
  const auto pairs = contrastive::import_pairs(root / "run" / "pairs" / "pairs.jsonl");
  EXPECT_EQ(pairs.size(), 10u);
  EXPECT_TRUE(fs::exists(root / "run" / "pairs" / "train" / "vocab.json"));
  // Each command prints a one-line JSON summary.
  for (const auto& c : run.commands) EXPECT_NO_THROW(json::parse(c.out)) << c.out;

  const auto review = run_cli({"review-export", "--samples",
                               (root / "run" / "scenarios" / "synthetic" / "test" / "MSConf.jsonl").string(), "--n",
                               "5", "--seed", "1", "--out", (root / "review.tsv").string()});
  ASSERT_EQ(review.code, 0) << review.err;
  const auto kept = run_cli({"review-import", "--samples",
                             (root / "run" / "scenarios" / "synthetic" / "test" / "MSConf.jsonl").string(), "--review",
                             (root / "review.tsv").string(), "--out", (root / "kept.jsonl").string()});
  ASSERT_EQ(kept.code, 0) << kept.err;
  EXPECT_EQ(read_text_file(root / "kept.jsonl"),
            read_text_file(root / "run" / "scenarios" / "synthetic" / "test" / "MSConf.jsonl"));
}

}  // namespace
}  // namespace robustqa::testing
