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

// Construction of the five interference scenarios from MRC records:
//   SS        original context
//   SSIncomp  context with the answer removed (sentence deletion or web search)
//   MSCons    context plus triples extracted from it that carry the answer
//   MSIncons  context plus retrieved triples that do not carry the answer
//   MSConf    context plus the MSCons triples with the answer falsified

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "robustqa/clients.hpp"
#include "robustqa/corpus.hpp"
#include "robustqa/jsonl.hpp"
#include "robustqa/text.hpp"
#include "robustqa/triples.hpp"

namespace robustqa::scenarios {

enum class Scenario { SS, SSIncomp, MSCons, MSIncons, MSConf };

inline constexpr std::array<Scenario, 5> kAllScenarios = {Scenario::SS, Scenario::SSIncomp, Scenario::MSCons,
                                                          Scenario::MSIncons, Scenario::MSConf};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

struct ScenarioSample {
  std::string id;
  std::string source_id;
  std::string dataset_id;
  Scenario scenario = Scenario::SS;
  Language language = Language::English;
  std::optional<Split> split;
  std::string question;
  std::optional<std::string> context;
  std::optional<std::vector<triples::Triple>> triples;
  std::string gold_answer;
  std::optional<std::string> false_answer;
  std::vector<json> provenance;

  bool operator==(const ScenarioSample&) const = default;
};

void to_json(json& j, const ScenarioSample& s);
void from_json(const json& j, ScenarioSample& s);

struct Skip {
  std::string reason;
};

using Outcome = std::variant<ScenarioSample, Skip>;

enum class SsIncompMethod { Auto, Deletion, Search };
enum class TermSource { Question, HeadEntities };

struct ScenarioOptions {
  SsIncompMethod ssincomp_method = SsIncompMethod::Auto;
  std::size_t min_sentences = 2;    // auto mode: fewer sentences -> search path
  std::size_t search_keywords = 3;  // TF-IDF keywords per query
  std::size_t search_results = 10;
  TermSource msincons_terms = TermSource::Question;
  std::size_t retrieval_limit = triples::kDefaultRetrievalLimit;
};

ScenarioSample build_ss(const QARecord& record);

/// Removes every sentence containing the answer.
Outcome build_ssincomp_deletion(const QARecord& record);

/// TF-IDF keywords -> web search -> first answer-free snippet becomes the context.
Outcome build_ssincomp_search(const QARecord& record, clients::SearchClient& search, const text::TfIdfModel& model,
                              const ScenarioOptions& options, const clients::RetryPolicy& retry);

/// Triples extracted from question + context; kept only if they carry the answer.
Outcome build_mscons(const QARecord& record, clients::ClientContext& ctx);

/// Up to retrieval_limit answer-free triples retrieved from the index. With
/// head-entity terms, `ctx` supplies the extraction; an empty extraction falls
/// back to the question tokens.
Outcome build_msincons(const QARecord& record, const triples::TripleIndex& index, const ScenarioOptions& options,
                       clients::ClientContext* ctx);

/// Substitutes a generated false answer for whole-word occurrences of the gold
/// answer inside the MSCons triples. The truthful context is kept.
Outcome build_msconf(const QARecord& record, const ScenarioSample& mscons, clients::ClientContext& ctx);

struct ScenarioCounts {
  std::size_t inputs = 0;
  std::size_t built = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::vector<std::pair<std::string, std::string>> failures;  // (record id, message)

  bool balanced() const { return built + skipped + failed == inputs; }
};

struct BuildReport {
  std::map<Scenario, ScenarioCounts> scenarios;
};

void to_json(json& j, const BuildReport& r);

struct BuildResources {
  clients::ClientContext* completion = nullptr;
  clients::SearchClient* search = nullptr;
  const triples::TripleIndex* index = nullptr;
  clients::RetryPolicy retry;
};

struct BuildOutput {
  std::map<Scenario, std::vector<ScenarioSample>> samples;
  BuildReport report;
};

/// Builds the enabled scenarios for every record, in input order. Client and
/// other infrastructure faults count as failed, quality-filter outcomes as
/// skipped. MSConf consumes the MSCons sample of the same record.
BuildOutput build_all(const std::vector<QARecord>& records, const std::set<Scenario>& enabled,
                      const ScenarioOptions& options, BuildResources& resources);

/// Scenario invariant violations of one sample; empty when it is valid.
std::vector<std::string> validate_sample(const ScenarioSample& sample,
                                         std::size_t retrieval_limit = triples::kDefaultRetrievalLimit);

struct Violation {
  std::string sample_id;
  std::string message;
};
std::vector<Violation> validate_samples(std::span<const ScenarioSample> samples,
                                        std::size_t retrieval_limit = triples::kDefaultRetrievalLimit);

/// Tab-separated review sheet (id, question, gold_answer, false_answer,
/// verdict) for a seeded uniform sample of n samples. The verdict column is blank.
std::string export_review(std::span<const ScenarioSample> samples, std::size_t n, std::uint64_t seed);

/// Drops the samples whose verdict cell is marked bad (bad, reject, fail, no,
/// n, 0, x, wrong). Blank or ok/good/yes/1 keeps the sample.
std::vector<ScenarioSample> import_review(std::span<const ScenarioSample> samples, std::string_view review_tsv);

}  // namespace robustqa::scenarios
