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

#include "robustqa/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "robustqa/log.hpp"
#include "robustqa/text.hpp"

namespace robustqa {

std::string_view to_string(Split split) { return split == Split::Dev ? "dev" : "test"; }

Split parse_split(std::string_view s) {
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  throw DataError("unknown split '" + std::string(s) + "'");
}

void to_json(json& j, const QARecord& r) {
  j = json{{"id", r.id},
           {"dataset", r.dataset_id},
           {"question", r.question},
           {"context", r.context},
           {"answer", r.answer},
           {"language", std::string(to_string(r.language))},
           {"split", r.split ? json(std::string(to_string(*r.split))) : json(nullptr)}};
}

void from_json(const json& j, QARecord& r) {
  r.id = require<std::string>(j, "id");
  r.dataset_id = require<std::string>(j, "dataset");
  r.question = require<std::string>(j, "question");
  r.context = require<std::string>(j, "context");
  r.answer = require<std::string>(j, "answer");
  r.language = parse_language(require<std::string>(j, "language"));
  const auto it = j.find("split");
  if (it == j.end() || it->is_null()) {
    r.split.reset();
  } else {
    r.split = parse_split(it->get<std::string>());
  }
  if (r.question.empty() || r.context.empty() || r.answer.empty()) {
    throw DataError("record " + r.id + ": question, context and answer must be non-empty");
  }
}

namespace {

json parse_file(const std::filesystem::path& path) {
  const std::string content = read_text_file(path);
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void warn(IngestResult& res, std::string location, std::string message) {
  log::warn(location + ": " + message);
  res.warnings.push_back({std::move(location), std::move(message)});
}

// Shared admission checks; returns false (with a warning) when the record is skipped.
bool admit(IngestResult& res, std::unordered_set<std::string>& ids, const QARecord& rec,
           const std::string& where) {
  if (rec.question.empty()) {
    warn(res, where, "empty question, skipped");
    return false;
  }
  if (rec.answer.empty() || text::normalize(rec.answer, rec.language).empty()) {
    warn(res, where, "missing gold answer, skipped");
    return false;
  }
  if (rec.context.empty()) {
    warn(res, where, "empty context, skipped");
    return false;
  }
  if (!text::contains_answer(rec.context, rec.answer, rec.language)) {
    warn(res, where, "answer not contained in context, skipped");
    return false;
  }
  if (!ids.insert(rec.id).second) {
    warn(res, where, "duplicate id '" + rec.id + "', skipped");
    return false;
  }
  return true;
}

}  // namespace

IngestResult ingest_squad(const json& doc, const std::string& dataset_id) {
  IngestResult res;
  std::unordered_set<std::string> ids;
  const auto data = doc.find("data");
  if (data == doc.end() || !data->is_array()) throw DataError("SQuAD: top-level 'data' array missing");
  for (std::size_t a = 0; a < data->size(); ++a) {
    const json& article = (*data)[a];
    const std::string art_loc = "article " + std::to_string(a);
    const auto paragraphs = article.find("paragraphs");
    if (paragraphs == article.end() || !paragraphs->is_array()) {
      throw DataError("SQuAD " + art_loc + ": 'paragraphs' array missing");
    }
    for (std::size_t p = 0; p < paragraphs->size(); ++p) {
      const json& para = (*paragraphs)[p];
      const std::string para_loc = art_loc + ", paragraph " + std::to_string(p);
      const auto ctx = para.find("context");
      const auto qas = para.find("qas");
      if (ctx == para.end() || !ctx->is_string() || qas == para.end() || !qas->is_array()) {
        throw DataError("SQuAD " + para_loc + ": expected 'context' string and 'qas' array");
      }
      for (std::size_t q = 0; q < qas->size(); ++q) {
        const json& qa = (*qas)[q];
        const std::string loc = para_loc + ", qa " + std::to_string(q);
        if (!qa.is_object() || !qa.contains("question") || !qa["question"].is_string()) {
          throw DataError("SQuAD " + loc + ": expected object with 'question'");
        }
        QARecord rec;
        rec.dataset_id = dataset_id;
        rec.language = Language::English;
        rec.context = ctx->get<std::string>();
        rec.question = qa["question"].get<std::string>();
        rec.id = qa.contains("id") && qa["id"].is_string()
                     ? qa["id"].get<std::string>()
                     : "a" + std::to_string(a) + "-p" + std::to_string(p) + "-q" + std::to_string(q);
        const auto answers = qa.find("answers");
        if (answers != qa.end() && answers->is_array() && !answers->empty()) {
          const json& first = answers->front();
          if (first.is_object() && first.contains("text") && first["text"].is_string()) {
            rec.answer = first["text"].get<std::string>();
          }
        }
        if (admit(res, ids, rec, "SQuAD " + loc)) res.records.push_back(std::move(rec));
      }
    }
  }
  return res;
}

IngestResult ingest_squad(const std::filesystem::path& path, const std::string& dataset_id) {
  return ingest_squad(parse_file(path), dataset_id);
}

namespace {

using ojson = nlohmann::ordered_json;

std::string first_answer(const ojson& a) {
  if (a.is_string()) return a.get<std::string>();
  if (a.is_array()) {
    for (const auto& x : a) {
      if (x.is_string() && x.get<std::string>() != "no_answer" && !x.get<std::string>().empty()) {
        return x.get<std::string>();
      }
    }
  }
  return {};
}

struct Evidence {
  std::string text;
  std::string answer;
};

std::vector<Evidence> collect_evidences(const ojson& ev, const std::string& loc) {
  std::vector<Evidence> out;
  auto one = [&](const ojson& e) {
    if (e.is_string()) {
      out.push_back({e.get<std::string>(), {}});
    } else if (e.is_object() && e.contains("evidence") && e["evidence"].is_string()) {
      out.push_back({e["evidence"].get<std::string>(),
                     e.contains("answer") ? first_answer(e["answer"]) : std::string()});
    } else {
      throw DataError("WebQA " + loc + ": malformed evidence entry");
    }
  };
  if (ev.is_array()) {
    for (const auto& e : ev) one(e);
  } else if (ev.is_object()) {
    for (const auto& [key, e] : ev.items()) one(e);
  } else {
    throw DataError("WebQA " + loc + ": 'evidences' must be an array or object");
  }
  return out;
}

}  // namespace

IngestResult ingest_webqa(const ojson& doc, const std::string& dataset_id) {
  IngestResult res;
  std::unordered_set<std::string> ids;
  auto handle = [&](const std::string& id, const ojson& item, const std::string& loc) {
    if (!item.is_object() || !item.contains("question") || !item["question"].is_string() ||
        !item.contains("evidences")) {
      throw DataError("WebQA " + loc + ": expected object with 'question' and 'evidences'");
    }
    const auto evidences = collect_evidences(item["evidences"], loc);
    QARecord rec;
    rec.id = id;
    rec.dataset_id = dataset_id;
    rec.language = Language::Chinese;
    rec.question = item["question"].get<std::string>();
    if (item.contains("answer")) rec.answer = first_answer(item["answer"]);
    for (std::size_t i = 0; rec.answer.empty() && i < evidences.size(); ++i) {
      rec.answer = evidences[i].answer;
    }
    if (rec.answer.empty()) {
      warn(res, "WebQA " + loc, "missing gold answer, skipped");
      return;
    }
    for (const auto& e : evidences) {
      if (!e.text.empty() && text::contains_answer(e.text, rec.answer, Language::Chinese)) {
        rec.context = e.text;
        break;
      }
    }
    if (rec.context.empty()) {
      warn(res, "WebQA " + loc, "no evidence contains the answer, skipped");
      return;
    }
    if (admit(res, ids, rec, "WebQA " + loc)) res.records.push_back(std::move(rec));
  };

  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& item = doc[i];
      std::string id = item.is_object() && item.contains("id") && item["id"].is_string()
                           ? item["id"].get<std::string>()
                           : "webqa-" + std::to_string(i);
      handle(id, item, "record " + std::to_string(i));
    }
  } else if (doc.is_object()) {
    for (const auto& [key, item] : doc.items()) handle(key, item, "record " + key);
  } else {
    throw DataError("WebQA: top level must be an array or object");
  }
  return res;
}

IngestResult ingest_webqa(const std::filesystem::path& path, const std::string& dataset_id) {
  const std::string content = read_text_file(path);
  ojson doc;
  try {
    doc = ojson::parse(content);
  } catch (const ojson::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return ingest_webqa(doc, dataset_id);
}

SplitResult sample_split(const std::vector<QARecord>& records, std::size_t n, std::uint64_t seed) {
  if (n % 2 != 0) throw std::invalid_argument("sample_split: n must be even");
  if (n > records.size()) {
    throw std::invalid_argument("sample_split: n=" + std::to_string(n) + " exceeds " +
                                std::to_string(records.size()) + " records");
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
  Rng rng(seed);
  // Partial Fisher-Yates: the first n slots are the sample, in draw order.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  SplitResult out;
  for (std::size_t i = 0; i < n; ++i) {
    QARecord rec = records[idx[i]];
    rec.split = i < n / 2 ? Split::Dev : Split::Test;
    (i < n / 2 ? out.dev : out.test).push_back(std::move(rec));
  }
  return out;
}

void to_json(json& j, const DatasetManifest& m) {
  j = json{{"dataset_id", m.dataset_id},   {"record_count", m.record_count},
           {"split_counts", m.split_counts}, {"construction_seed", m.construction_seed},
           {"source_path", m.source_path},   {"checksum", m.checksum}};
}

void from_json(const json& j, DatasetManifest& m) {
  m.dataset_id = require<std::string>(j, "dataset_id");
  m.record_count = require<std::size_t>(j, "record_count");
  m.split_counts = require<std::map<std::string, std::size_t>>(j, "split_counts");
  m.construction_seed = require<std::uint64_t>(j, "construction_seed");
  m.source_path = require<std::string>(j, "source_path");
  m.checksum = require<std::string>(j, "checksum");
}

DatasetManifest make_manifest(const std::string& dataset_id, const std::vector<QARecord>& records,
                              std::uint64_t seed, const std::string& source_path,
                              std::string_view payload) {
  DatasetManifest m;
  m.dataset_id = dataset_id;
  m.record_count = records.size();
  m.construction_seed = seed;
  m.source_path = source_path;
  m.checksum = sha256_hex(payload);
  for (const auto& r : records) {
    if (r.split) ++m.split_counts[std::string(to_string(*r.split))];
  }
  return m;
}

}  // namespace robustqa
