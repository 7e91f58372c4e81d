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

#include <algorithm>
#include <set>

#include "robustqa/corpus.hpp"

namespace robustqa {
namespace {

json squad_doc(std::size_t paragraphs, std::size_t qas_per) {
  json data = json::array();
  json paras = json::array();
  for (std::size_t p = 0; p < paragraphs; ++p) {
    json qas = json::array();
    for (std::size_t q = 0; q < qas_per; ++q) {
      const std::string ans = "Answer" + std::to_string(p) + "x" + std::to_string(q);
      qas.push_back({{"id", "q" + std::to_string(p) + "-" + std::to_string(q)},
                     {"question", "What is " + std::to_string(q) + "?"},
                     {"answers", json::array({{{"text", ans}, {"answer_start", 0}}})}});
    }
    std::string ctx = "Paragraph " + std::to_string(p) + ".";
    for (std::size_t q = 0; q < qas_per; ++q) ctx += " It mentions Answer" + std::to_string(p) + "x" + std::to_string(q) + ".";
    paras.push_back({{"context", ctx}, {"qas", qas}});
  }
  data.push_back({{"title", "T"}, {"paragraphs", paras}});
  return {{"version", "1.1"}, {"data", data}};
}

TEST(IngestSquad, OneParagraphTwoQuestions) {
  const auto res = ingest_squad(squad_doc(1, 2));
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_TRUE(res.warnings.empty());
  EXPECT_EQ(res.records[0].answer, "Answer0x0");
  EXPECT_EQ(res.records[1].context, res.records[0].context);
  EXPECT_EQ(res.records[0].language, Language::English);
  EXPECT_EQ(res.records[0].dataset_id, "squad");
}

TEST(IngestSquad, EmptyAnswersSkippedWithWarning) {
  auto doc = squad_doc(1, 2);
  doc["data"][0]["paragraphs"][0]["qas"][1]["answers"] = json::array();
  const auto res = ingest_squad(doc);
  EXPECT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(IngestSquad, CountMatchesQuestionTotal) {
  for (std::size_t per : {1u, 3u}) {
    const auto res = ingest_squad(squad_doc(100, per));
    EXPECT_EQ(res.records.size(), 100 * per);
    std::set<std::string> ids;
    for (const auto& r : res.records) ids.insert(r.id);
    EXPECT_EQ(ids.size(), res.records.size());
  }
}

TEST(IngestSquad, MissingDataIsAnError) {
  EXPECT_THROW(ingest_squad(json{{"version", "1.1"}}), DataError);
}

TEST(IngestWebqa, UsesFirstEvidenceWithAnswer) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  doc.push_back({{"id", "w1"},
                 {"question", "长江在哪里"},
                 {"answer", "中国"},
                 {"evidences", {"这是一条无关的证据。", "长江位于中国。", "中国有长江。"}}});
  const auto res = ingest_webqa(doc);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].context, "长江位于中国。");
  EXPECT_EQ(res.records[0].language, Language::Chinese);
}

TEST(IngestWebqa, UnanswerableRecordsSkipped) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (int i = 0; i < 50; ++i) {
    const bool answerable = i % 12 != 5;  // 4 of 50 lack the answer
    doc.push_back({{"question", "问题" + std::to_string(i)},
                   {"answer", "答案" + std::to_string(i)},
                   {"evidences", {answerable ? "这里有答案" + std::to_string(i) + "。" : "没有。"}}});
  }
  const auto res = ingest_webqa(doc);
  EXPECT_EQ(res.records.size(), 46u);
  EXPECT_EQ(res.warnings.size(), 4u);
  EXPECT_EQ(res.records[0].id, "webqa-0");
}

TEST(IngestWebqa, KeyedForm) {
  nlohmann::ordered_json doc = {
      {"Q1", {{"question", "谁写了红楼梦"},
              {"evidences", {{"Q1#00", {{"evidence", "红楼梦由曹雪芹所写。"}, {"answer", {"曹雪芹"}}}}}}}}};
  const auto res = ingest_webqa(doc);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].id, "Q1");
  EXPECT_EQ(res.records[0].answer, "曹雪芹");
}

std::vector<QARecord> make_records(std::size_t n) {
  std::vector<QARecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    QARecord r;
    r.id = "r" + std::to_string(100000 + i);
    r.dataset_id = "d";
    r.question = "q";
    r.context = "ctx a";
    r.answer = "a";
    out.push_back(r);
  }
  return out;
}

TEST(SampleSplit, HalvesDisjointSubset) {
  const auto recs = make_records(2000);
  const auto s = sample_split(recs, 500, 11);
  EXPECT_EQ(s.dev.size(), 250u);
  EXPECT_EQ(s.test.size(), 250u);
  std::set<std::string> ids;
  for (const auto& r : s.dev) {
    EXPECT_EQ(r.split, Split::Dev);
    ids.insert(r.id);
  }
  for (const auto& r : s.test) {
    EXPECT_EQ(r.split, Split::Test);
    ids.insert(r.id);
  }
  EXPECT_EQ(ids.size(), 500u);
}

TEST(SampleSplit, IndependentOfInputOrder) {
  auto recs = make_records(10000);
  const auto a = sample_split(recs, 500, 3);
  std::reverse(recs.begin(), recs.end());
  const auto b = sample_split(recs, 500, 3);
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_EQ(a.test, b.test);
  const auto c = sample_split(recs, 500, 4);
  EXPECT_NE(a.dev, c.dev);
}

TEST(SampleSplit, RejectsBadSizes) {
  const auto recs = make_records(10);
  EXPECT_THROW(sample_split(recs, 3, 1), std::invalid_argument);
  EXPECT_THROW(sample_split(recs, 12, 1), std::invalid_argument);
  EXPECT_EQ(sample_split(recs, 10, 1).dev.size(), 5u);
}

TEST(Jsonl, RoundTripRecords) {
  auto recs = make_records(5);
  recs[1].split = Split::Test;
  recs[2].language = Language::Chinese;
  const auto text = to_jsonl(recs);
  EXPECT_EQ(parse_jsonl<QARecord>(text, "mem"), recs);
}

TEST(Jsonl, CorruptLineNamesLineNumber) {
  auto text = to_jsonl(make_records(3));
  text += "{not json\n";
  try {
    parse_jsonl<QARecord>(text, "f.jsonl");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("f.jsonl:4"), std::string::npos) << e.what();
  }
}

TEST(Manifest, CountsAndChecksum) {
  const auto recs = make_records(10);
  const auto s = sample_split(recs, 4, 2);
  std::vector<QARecord> all = s.dev;
  all.insert(all.end(), s.test.begin(), s.test.end());
  const std::string payload = to_jsonl(all);
  const auto m = make_manifest("d", all, 2, "in.jsonl", payload);
  EXPECT_EQ(m.record_count, 4u);
  EXPECT_EQ(m.split_counts.at("dev"), 2u);
  EXPECT_EQ(m.split_counts.at("test"), 2u);
  EXPECT_EQ(m.checksum, sha256_hex(payload));
  EXPECT_EQ(json(m).get<DatasetManifest>(), m);
}

}  // namespace
}  // namespace robustqa
