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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robustqa/common.hpp"
#include "robustqa/jsonl.hpp"

namespace robustqa {

enum class Split { Dev, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view s);

/// One machine-reading-comprehension instance.
struct QARecord {
  std::string id;
  std::string dataset_id;
  std::string question;
  std::string context;
  std::string answer;
  Language language = Language::English;
  std::optional<Split> split;

  bool operator==(const QARecord&) const = default;
};

void to_json(json& j, const QARecord& r);
void from_json(const json& j, QARecord& r);

struct IngestIssue {
  std::string location;
  std::string message;
};

struct IngestResult {
  std::vector<QARecord> records;
  std::vector<IngestIssue> warnings;
};

/// SQuAD v1.1 layout: data[].paragraphs[].{context, qas[].{id, question, answers[]}}.
/// The first gold answer of each question is kept; questions without an answer
/// or whose answer is not contained in the context are skipped with a warning.
IngestResult ingest_squad(const json& doc, const std::string& dataset_id = "squad");
IngestResult ingest_squad(const std::filesystem::path& path, const std::string& dataset_id = "squad");

/// WebQA layout, either the original object keyed by question id
///   {"Q1": {"question": ..., "evidences": {"Q1#00": {"evidence": ..., "answer": [...]}}}}
/// or an array of {"id", "question", "answer", "evidences": [text | {"evidence", "answer"}]}.
/// The context is the first evidence that contains the answer.
IngestResult ingest_webqa(const nlohmann::ordered_json& doc, const std::string& dataset_id = "webqa");
IngestResult ingest_webqa(const std::filesystem::path& path, const std::string& dataset_id = "webqa");

struct SplitResult {
  std::vector<QARecord> dev;
  std::vector<QARecord> test;
};

/// Uniform sample of n records (n even) without replacement, halved into dev
/// and test. Depends only on the record ids, n and seed, not on input order.
SplitResult sample_split(const std::vector<QARecord>& records, std::size_t n, std::uint64_t seed);

struct DatasetManifest {
  std::string dataset_id;
  std::size_t record_count = 0;
  std::map<std::string, std::size_t> split_counts;
  std::uint64_t construction_seed = 0;
  std::string source_path;
  std::string checksum;  // sha256 of the payload bytes

  bool operator==(const DatasetManifest&) const = default;
};

void to_json(json& j, const DatasetManifest& m);
void from_json(const json& j, DatasetManifest& m);

DatasetManifest make_manifest(const std::string& dataset_id, const std::vector<QARecord>& records,
                              std::uint64_t seed, const std::string& source_path,
                              std::string_view payload);

}  // namespace robustqa
