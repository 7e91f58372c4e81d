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

// Pipeline configuration file. Every key is optional except "seeds"; unknown
// keys are rejected with their JSON path. to_json() echoes the fully resolved
// configuration, which is itself valid input.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "robustqa/augment.hpp"
#include "robustqa/clients.hpp"
#include "robustqa/contrastive.hpp"
#include "robustqa/eval.hpp"
#include "robustqa/jsonl.hpp"
#include "robustqa/scenarios.hpp"

namespace robustqa {

struct Seeds {
  std::uint64_t split = 0;
  std::uint64_t augment = 0;
  std::uint64_t review = 0;
  std::uint64_t pairs = 0;
};

struct DatasetSource {
  std::string format;  // "squad" or "webqa"
  std::string path;
};

struct CompletionSettings {
  std::string base_url = "https://api.openai.com";
  std::string base_url_env = "OPENAI_BASE_URL";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  std::int64_t timeout_ms = 60000;
  std::size_t max_in_flight = 4;
  double temperature = 0.0;
};

struct SearchSettings {
  std::string base_url = "https://serpapi.com";
  std::string base_url_env = "SERPAPI_BASE_URL";
  std::string engine = "google";
  std::string api_key_env = "SERPAPI_API_KEY";
  std::int64_t timeout_ms = 30000;
};

struct ClientSettings {
  std::string mode = "mock";  // "mock" or "live"
  std::string mock_fixtures;  // directory with completions.jsonl / search.jsonl
  std::string templates;      // optional override file
  bool strict_triples = true;
  std::size_t max_attempts = 3;
  std::int64_t backoff_ms = 500;
  double backoff_multiplier = 2.0;
  CompletionSettings completion;
  SearchSettings search;

  clients::RetryPolicy retry() const;
};

struct ScenarioSettings {
  std::vector<scenarios::Scenario> enabled{scenarios::kAllScenarios.begin(), scenarios::kAllScenarios.end()};
  scenarios::ScenarioOptions options;
  std::size_t review_n = 100;
};

struct EvalSettings {
  eval::EvalOptions options;
};

struct ContrastiveSettings {
  std::size_t target_n = 3500;
  contrastive::Balance balance;
  std::vector<std::string> refusal_phrases = contrastive::default_refusal_phrases();
  contrastive::Reduction reduction = contrastive::Reduction::Sum;
};

struct PipelineConfig {
  Seeds seeds;
  std::map<std::string, DatasetSource> datasets;
  std::size_t split_n = 500;
  augment::AugmentConfig augment;  // augment.seed mirrors seeds.augment
  ScenarioSettings scenarios;
  ClientSettings clients;
  EvalSettings eval;
  ContrastiveSettings contrastive;
};

/// Throws ConfigError (unknown key, wrong type, missing seeds, bad value).
PipelineConfig config_from_json(const json& j);
json config_to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace robustqa
