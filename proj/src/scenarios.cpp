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

#include "robustqa/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_set>

#include "robustqa/log.hpp"

namespace robustqa::scenarios {

namespace {

using triples::Triple;

constexpr std::array<std::string_view, 5> kNames = {"SS", "SSIncomp", "MSCons", "MSIncons", "MSConf"};

ScenarioSample base_sample(const QARecord& r, Scenario s) {
  ScenarioSample out;
  out.id = r.id + "#" + std::string(to_string(s));
  out.source_id = r.id;
  out.dataset_id = r.dataset_id;
  out.scenario = s;
  out.language = r.language;
  out.split = r.split;
  out.question = r.question;
  out.gold_answer = r.answer;
  return out;
}

json range_json(const text::ByteRange& r) { return json::array({r.begin, r.end}); }

std::string trim_ws(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_ms(Scenario s) { return s == Scenario::MSCons || s == Scenario::MSIncons || s == Scenario::MSConf; }

bool iequal(std::string_view a, std::string_view b) {
  return a.size() == b.size() && text::casefold(a) == text::casefold(b);
}

bool word_edge(std::string_view s, std::size_t pos) {
  if (pos == 0 || pos == s.size()) return true;
  const auto c = static_cast<unsigned char>(s[pos]);
  const auto p = static_cast<unsigned char>(s[pos - 1]);
  return !(std::isalnum(c) && std::isalnum(p));
}

// Grows an occurrence over words the replacement already carries, so that
// "Oxford's Magdalen Tower" with replacement "Oxford's Radcliffe Camera"
// becomes "Oxford's Radcliffe Camera" rather than repeating "Oxford's".
text::ByteRange widen_to_overlap(std::string_view field, text::ByteRange occ, std::string_view replacement) {
  std::vector<std::string_view> words;
  for (std::size_t p = 0; p < replacement.size();) {
    const auto sp = replacement.find(' ', p);
    const auto e = sp == std::string_view::npos ? replacement.size() : sp;
    if (e > p) words.push_back(replacement.substr(p, e - p));
    p = e + 1;
  }
  if (words.size() < 2) return occ;
  for (std::size_t k = words.size() - 1; k >= 1; --k) {
    const std::string_view prefix =
        replacement.substr(0, static_cast<std::size_t>(words[k - 1].data() + words[k - 1].size() - replacement.data()));
    if (occ.begin >= prefix.size() + 1 && field[occ.begin - 1] == ' ' &&
        iequal(field.substr(occ.begin - 1 - prefix.size(), prefix.size()), prefix) &&
        word_edge(field, occ.begin - 1 - prefix.size())) {
      occ.begin -= prefix.size() + 1;
      break;
    }
  }
  for (std::size_t k = words.size() - 1; k >= 1; --k) {
    const std::size_t from = static_cast<std::size_t>(words[words.size() - k].data() - replacement.data());
    const std::string_view suffix = replacement.substr(from);
    if (occ.end + 1 + suffix.size() <= field.size() && field[occ.end] == ' ' &&
        iequal(field.substr(occ.end + 1, suffix.size()), suffix) && word_edge(field, occ.end + 1 + suffix.size())) {
      occ.end += suffix.size() + 1;
      break;
    }
  }
  return occ;
}

}  // namespace

std::string_view to_string(Scenario s) { return kNames[static_cast<std::size_t>(s)]; }

Scenario parse_scenario(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::erase(lower, '-');
  std::erase(lower, '_');
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    std::string name(kNames[i]);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == name) return static_cast<Scenario>(i);
  }
  throw UsageError("unknown scenario '" + std::string(s) + "' (expected SS, SSIncomp, MSCons, MSIncons or MSConf)");
}

void to_json(json& j, const ScenarioSample& s) {
  j = json{{"id", s.id},
           {"source_id", s.source_id},
           {"dataset", s.dataset_id},
           {"scenario", to_string(s.scenario)},
           {"language", to_string(s.language)},
           {"split", s.split ? json(to_string(*s.split)) : json(nullptr)},
           {"question", s.question},
           {"context", s.context ? json(*s.context) : json(nullptr)},
           {"triples", s.triples ? json(*s.triples) : json(nullptr)},
           {"gold_answer", s.gold_answer},
           {"false_answer", s.false_answer ? json(*s.false_answer) : json(nullptr)},
           {"provenance", s.provenance}};
}

void from_json(const json& j, ScenarioSample& s) {
  s.id = require<std::string>(j, "id");
  s.source_id = require<std::string>(j, "source_id");
  s.dataset_id = j.value("dataset", "");
  s.scenario = parse_scenario(require<std::string>(j, "scenario"));
  s.language = parse_language(require<std::string>(j, "language"));
  s.split.reset();
  if (j.contains("split") && !j["split"].is_null()) s.split = parse_split(j["split"].get<std::string>());
  s.question = require<std::string>(j, "question");
  s.context.reset();
  if (j.contains("context") && !j["context"].is_null()) s.context = j["context"].get<std::string>();
  s.triples.reset();
  if (j.contains("triples") && !j["triples"].is_null()) s.triples = j["triples"].get<std::vector<Triple>>();
  s.gold_answer = require<std::string>(j, "gold_answer");
  s.false_answer.reset();
  if (j.contains("false_answer") && !j["false_answer"].is_null()) s.false_answer = j["false_answer"].get<std::string>();
  s.provenance.clear();
  if (j.contains("provenance")) s.provenance = j["provenance"].get<std::vector<json>>();
}

// ---------------------------------------------------------------------------
// Builders

ScenarioSample build_ss(const QARecord& record) {
  ScenarioSample s = base_sample(record, Scenario::SS);
  s.context = record.context;
  s.provenance.push_back({{"step", "ss.passthrough"}});
  return s;
}

Outcome build_ssincomp_deletion(const QARecord& record) {
  const auto sentences = text::split_sentences(record.context);
  std::string remainder;
  json removed = json::array();
  for (const auto& r : sentences) {
    const std::string_view sentence = std::string_view(record.context).substr(r.begin, r.size());
    if (text::contains_answer(sentence, record.answer, record.language)) {
      removed.push_back(range_json(r));
    } else {
      remainder += sentence;
    }
  }
  remainder = trim_ws(remainder);
  if (remainder.empty()) return Skip{"empty remainder"};
  if (text::contains_answer(remainder, record.answer, record.language)) return Skip{"answer still in remainder"};
  ScenarioSample s = base_sample(record, Scenario::SSIncomp);
  s.context = std::move(remainder);
  s.provenance.push_back({{"step", "ssincomp.deletion"}, {"sentences", sentences.size()}, {"removed", removed}});
  return s;
}

Outcome build_ssincomp_search(const QARecord& record, clients::SearchClient& search, const text::TfIdfModel& model,
                              const ScenarioOptions& options, const clients::RetryPolicy& retry) {
  const auto keywords = text::tfidf_keywords(model, record.question, options.search_keywords);
  const auto results = clients::web_search(search, keywords, options.search_results, retry);
  if (results.empty()) return Skip{"empty search"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& snippet = results[i].snippet;
    if (trim_ws(snippet).empty() || text::contains_answer(snippet, record.answer, record.language)) continue;
    ScenarioSample s = base_sample(record, Scenario::SSIncomp);
    s.context = snippet;
    s.provenance.push_back({{"step", "ssincomp.search"},
                            {"keywords", keywords},
                            {"result_index", i},
                            {"url", results[i].url}});
    return s;
  }
  return Skip{"no answer-free result"};
}

Outcome build_mscons(const QARecord& record, clients::ClientContext& ctx) {
  auto extracted = clients::extract_triples(ctx, record.question, record.context, record.language);
  if (extracted.empty()) return Skip{"no triples extracted"};
  if (!text::contains_answer(triples::render_triples(extracted), record.answer, record.language)) {
    return Skip{"answer not in triples"};
  }
  ScenarioSample s = base_sample(record, Scenario::MSCons);
  s.context = record.context;
  s.provenance.push_back({{"step", "mscons.extract"}, {"triple_count", extracted.size()}});
  s.triples = std::move(extracted);
  return s;
}

Outcome build_msincons(const QARecord& record, const triples::TripleIndex& index, const ScenarioOptions& options,
                       clients::ClientContext* ctx) {
  std::string terms_source = "question";
  text::TokenSeq terms;
  if (options.msincons_terms == TermSource::HeadEntities) {
    if (ctx == nullptr) throw ConfigError("head-entity query terms need a completion client");
    const auto entities = clients::extract_head_entities(*ctx, record.question, record.language);
    std::string joined;
    for (const auto& e : entities) joined += e + " ";
    terms = text::tokenize(joined, index.language());
    terms_source = "head_entities";
    if (terms.empty()) terms_source = "question_fallback";
  }
  if (terms.empty()) terms = text::tokenize(record.question, index.language());
  if (terms.empty()) return Skip{"no query terms"};

  const auto hits = triples::query(index, terms, options.retrieval_limit, record.answer);
  // The index may normalize under a different language than the record; keep
  // only what stays answer-free under the record's own rules.
  std::vector<Triple> kept;
  json ids = json::array();
  json scores = json::array();
  for (const auto& h : hits) {
    const Triple& t = index.triple(h.id);
    if (text::contains_answer(triples::render_triple(t), record.answer, record.language)) continue;
    kept.push_back(t);
    ids.push_back(h.id);
    scores.push_back(h.score);
  }
  if (kept.empty()) return Skip{"no retrieval hits"};
  ScenarioSample s = base_sample(record, Scenario::MSIncons);
  s.context = record.context;
  s.triples = std::move(kept);
  s.provenance.push_back({{"step", "msincons.retrieve"},
                          {"terms_source", terms_source},
                          {"terms", terms.tokens},
                          {"triple_ids", ids},
                          {"scores", scores}});
  return s;
}

Outcome build_msconf(const QARecord& record, const ScenarioSample& mscons, clients::ClientContext& ctx) {
  if (mscons.scenario != Scenario::MSCons || !mscons.triples || mscons.source_id != record.id) {
    throw std::invalid_argument("build_msconf: needs the MSCons sample of record " + record.id);
  }
  const Language lang = record.language;
  // Cheap pre-check so no client call is spent on a record with nothing to replace.
  bool any = false;
  for (const auto& t : *mscons.triples) {
    for (const std::string* f : {&t.head, &t.relation, &t.tail}) {
      if (!text::find_occurrences(*f, record.answer, lang, true).empty()) any = true;
    }
  }
  if (!any) return Skip{"nothing to substitute"};

  const std::string false_answer = clients::generate_false_answer(ctx, record.question, record.answer, lang);
  if (!text::find_occurrences(false_answer, record.answer, lang, true).empty()) {
    return Skip{"false answer contains gold answer"};
  }

  std::vector<Triple> out = *mscons.triples;
  json replacements = json::array();
  static constexpr std::array<std::string_view, 3> kFields = {"head", "relation", "tail"};
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<std::string*, 3> fields = {&out[i].head, &out[i].relation, &out[i].tail};
    for (std::size_t f = 0; f < fields.size(); ++f) {
      std::string& field = *fields[f];
      const auto occ = text::find_occurrences(field, record.answer, lang, true);
      for (auto it = occ.rbegin(); it != occ.rend(); ++it) {
        const text::ByteRange r = widen_to_overlap(field, *it, false_answer);
        field.replace(r.begin, r.size(), false_answer);
        replacements.push_back({{"triple", i}, {"field", kFields[f]}, {"begin", r.begin}, {"end", r.end}});
      }
    }
  }
  for (const auto& t : out) {
    if (!triples::is_valid_triple(t)) return Skip{"substituted triple invalid"};
  }
  const std::string rendered = triples::render_triples(out);
  if (!text::find_occurrences(rendered, record.answer, lang, true).empty()) return Skip{"gold answer remains in triples"};
  if (!text::contains_answer(rendered, false_answer, lang)) return Skip{"false answer not in triples"};

  ScenarioSample s = base_sample(record, Scenario::MSConf);
  s.context = record.context;
  s.triples = std::move(out);
  s.false_answer = false_answer;
  s.provenance = mscons.provenance;
  s.provenance.push_back({{"step", "msconf.substitute"}, {"false_answer", false_answer}, {"replacements", replacements}});
  return s;
}

// ---------------------------------------------------------------------------
// Batch driver

void to_json(json& j, const BuildReport& r) {
  j = json::object();
  for (const auto& [scenario, c] : r.scenarios) {
    json failures = json::array();
    for (const auto& [id, msg] : c.failures) failures.push_back({{"id", id}, {"error", msg}});
    j[std::string(to_string(scenario))] = {{"inputs", c.inputs},     {"built", c.built},
                                           {"skipped", c.skipped},   {"failed", c.failed},
                                           {"skip_reasons", c.skip_reasons}, {"failures", failures}};
  }
}

namespace {

struct Recorder {
  ScenarioCounts& counts;
  std::vector<ScenarioSample>* sink;

  // Returns the built sample, if any.
  template <class F>
  std::optional<ScenarioSample> run(const QARecord& record, F&& f) {
    ++counts.inputs;
    try {
      Outcome o = f();
      if (auto* skip = std::get_if<Skip>(&o)) {
        ++counts.skipped;
        ++counts.skip_reasons[skip->reason];
        return std::nullopt;
      }
      ++counts.built;
      auto& sample = std::get<ScenarioSample>(o);
      if (sink) sink->push_back(sample);
      return sample;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ++counts.failed;
      counts.failures.emplace_back(record.id, e.what());
      log::warn("record " + record.id + ": " + e.what());
      return std::nullopt;
    }
  }
};

}  // namespace

BuildOutput build_all(const std::vector<QARecord>& records, const std::set<Scenario>& enabled,
                      const ScenarioOptions& options, BuildResources& res) {
  BuildOutput out;
  const bool need_client = enabled.count(Scenario::MSCons) || enabled.count(Scenario::MSConf) ||
                           (enabled.count(Scenario::MSIncons) && options.msincons_terms == TermSource::HeadEntities);
  if (need_client && res.completion == nullptr) throw ConfigError("the enabled scenarios need a completion client");
  if (enabled.count(Scenario::MSIncons) && res.index == nullptr) throw ConfigError("MSIncons needs a triple index");
  if (enabled.count(Scenario::SSIncomp) && options.ssincomp_method == SsIncompMethod::Search && res.search == nullptr) {
    throw ConfigError("SSIncomp search method needs a search client");
  }

  // One TF-IDF model per language over the batch contexts.
  std::map<Language, text::TfIdfModel> models;
  if (enabled.count(Scenario::SSIncomp) && res.search != nullptr) {
    std::map<Language, std::vector<std::string>> docs;
    for (const auto& r : records) docs[r.language].push_back(r.context);
    for (auto& [lang, d] : docs) models.emplace(lang, text::TfIdfModel::fit(d, lang));
  }

  for (Scenario s : kAllScenarios) {
    if (enabled.count(s)) out.report.scenarios[s];
  }
  auto sink = [&](Scenario s) -> std::vector<ScenarioSample>* {
    return enabled.count(s) ? &out.samples[s] : nullptr;
  };
  ScenarioCounts scratch;

  for (const auto& record : records) {
    if (enabled.count(Scenario::SS)) {
      Recorder{out.report.scenarios[Scenario::SS], sink(Scenario::SS)}.run(record, [&]() -> Outcome {
        return build_ss(record);
      });
    }
    if (enabled.count(Scenario::SSIncomp)) {
      Recorder{out.report.scenarios[Scenario::SSIncomp], sink(Scenario::SSIncomp)}.run(record, [&]() -> Outcome {
        bool use_search = options.ssincomp_method == SsIncompMethod::Search;
        if (options.ssincomp_method == SsIncompMethod::Auto && res.search != nullptr) {
          use_search = record.language == Language::Chinese ||
                       text::split_sentences(record.context).size() < options.min_sentences;
        }
        if (use_search) {
          return build_ssincomp_search(record, *res.search, models.at(record.language), options, res.retry);
        }
        return build_ssincomp_deletion(record);
      });
    }
    std::optional<ScenarioSample> mscons;
    if (enabled.count(Scenario::MSCons) || enabled.count(Scenario::MSConf)) {
      ScenarioCounts& counts = enabled.count(Scenario::MSCons) ? out.report.scenarios[Scenario::MSCons] : scratch;
      mscons = Recorder{counts, sink(Scenario::MSCons)}.run(record, [&]() -> Outcome {
        return build_mscons(record, *res.completion);
      });
    }
    if (enabled.count(Scenario::MSIncons)) {
      Recorder{out.report.scenarios[Scenario::MSIncons], sink(Scenario::MSIncons)}.run(record, [&]() -> Outcome {
        return build_msincons(record, *res.index, options, res.completion);
      });
    }
    if (enabled.count(Scenario::MSConf)) {
      Recorder{out.report.scenarios[Scenario::MSConf], sink(Scenario::MSConf)}.run(record, [&]() -> Outcome {
        if (!mscons) return Skip{"no MSCons sample"};
        return build_msconf(record, *mscons, *res.completion);
      });
    }
  }
  for (Scenario s : kAllScenarios) {
    if (enabled.count(s)) out.samples[s];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_sample(const ScenarioSample& s, std::size_t retrieval_limit) {
  std::vector<std::string> v;
  const Language lang = s.language;
  if (s.question.empty()) v.push_back("empty question");
  if (text::normalize(s.gold_answer, lang).empty()) {
    v.push_back("empty gold answer");
    return v;
  }
  if (!s.context || s.context->empty()) v.push_back("missing context");
  if (is_ms(s.scenario)) {
    if (!s.triples || s.triples->empty()) {
      v.push_back("triples missing or empty");
      return v;
    }
    for (const auto& t : *s.triples) {
      if (!triples::is_valid_triple(t)) v.push_back("invalid triple '" + triples::render_triple(t) + "'");
    }
  } else if (s.triples) {
    v.push_back("triples present on a single-source sample");
  }
  const std::string rendered = s.triples ? triples::render_triples(*s.triples) : std::string();
  switch (s.scenario) {
    case Scenario::SS:
      break;
    case Scenario::SSIncomp:
      if (s.context && text::contains_answer(*s.context, s.gold_answer, lang)) v.push_back("context contains the answer");
      break;
    case Scenario::MSCons:
      if (!text::contains_answer(rendered, s.gold_answer, lang)) v.push_back("answer not in triples");
      break;
    case Scenario::MSIncons:
      if (text::contains_answer(rendered, s.gold_answer, lang)) v.push_back("answer in triples");
      if (s.triples->size() > retrieval_limit) v.push_back("more than " + std::to_string(retrieval_limit) + " triples");
      break;
    case Scenario::MSConf:
      if (!s.false_answer || text::normalize(*s.false_answer, lang).empty()) {
        v.push_back("false answer missing");
        break;
      }
      if (text::normalize(*s.false_answer, lang) == text::normalize(s.gold_answer, lang)) {
        v.push_back("false answer equals gold answer");
      }
      if (!text::contains_answer(rendered, *s.false_answer, lang)) v.push_back("false answer not in triples");
      if (!text::find_occurrences(rendered, s.gold_answer, lang, true).empty()) v.push_back("gold answer left in triples");
      if (s.context && !text::contains_answer(*s.context, s.gold_answer, lang)) v.push_back("context lost the gold answer");
      break;
  }
  return v;
}

std::vector<Violation> validate_samples(std::span<const ScenarioSample> samples, std::size_t retrieval_limit) {
  std::vector<Violation> out;
  for (const auto& s : samples) {
    for (auto& m : validate_sample(s, retrieval_limit)) out.push_back({s.id, std::move(m)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Human review

namespace {

std::string cell(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::string export_review(std::span<const ScenarioSample> samples, std::size_t n, std::uint64_t seed) {
  if (n > samples.size()) {
    throw std::invalid_argument("export_review: n=" + std::to_string(n) + " exceeds " + std::to_string(samples.size()) +
                                " samples");
  }
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a].id < samples[b].id; });
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a].id < samples[b].id; });

  std::string out = "id\tquestion\tgold_answer\tfalse_answer\tverdict\n";
  for (std::size_t i : order) {
    const auto& s = samples[i];
    out += cell(s.id) + '\t' + cell(s.question) + '\t' + cell(s.gold_answer) + '\t' + cell(s.false_answer.value_or("")) +
           "\t\n";
  }
  return out;
}

std::vector<ScenarioSample> import_review(std::span<const ScenarioSample> samples, std::string_view review_tsv) {
  static const std::unordered_set<std::string> kDrop = {"bad", "reject", "rejected", "fail", "no", "n", "0", "x", "wrong"};
  static const std::unordered_set<std::string> kKeep = {"", "ok", "good", "pass", "yes", "y", "1", "accept", "correct"};
  std::unordered_set<std::string> known;
  for (const auto& s : samples) known.insert(s.id);

  std::unordered_set<std::string> dropped;
  std::istringstream in{std::string(review_tsv)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t verdict_col = 4;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim_ws(line).empty()) continue;
    auto cols = split_tabs(line);
    if (line_no == 1 && !cols.empty() && cols[0] == "id") {
      const auto it = std::find(cols.begin(), cols.end(), "verdict");
      if (it == cols.end()) throw DataError("review sheet: header has no verdict column");
      verdict_col = static_cast<std::size_t>(it - cols.begin());
      continue;
    }
    const std::string& id = cols[0];
    if (!known.count(id)) throw DataError("review sheet line " + std::to_string(line_no) + ": unknown sample id '" + id + "'");
    std::string verdict = cols.size() > verdict_col ? trim_ws(cols[verdict_col]) : std::string();
    std::transform(verdict.begin(), verdict.end(), verdict.begin(), [](unsigned char c) { return std::tolower(c); });
    if (kDrop.count(verdict)) {
      dropped.insert(id);
    } else if (!kKeep.count(verdict)) {
      throw DataError("review sheet line " + std::to_string(line_no) + ": unrecognized verdict '" + verdict + "' for " + id);
    }
  }
  std::vector<ScenarioSample> out;
  for (const auto& s : samples) {
    if (!dropped.count(s.id)) out.push_back(s);
  }
  return out;
}

}  // namespace robustqa::scenarios
