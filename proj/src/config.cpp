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

#include "robustqa/config.hpp"

#include <set>
#include <type_traits>

namespace robustqa {

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config " + path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer() || (!it->is_number_unsigned() && it->template get<std::int64_t>() < 0)) {
        throw ConfigError("config " + where(key) + ": expected a non-negative integer");
      }
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw ConfigError("config " + where(key) + ": expected an integer");
    }
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config " + where(key) + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + where(k) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& value, const std::string& where, std::initializer_list<std::pair<const char*, E>> options) {
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError("config " + where + ": '" + value + "' is not one of " + allowed);
}

template <class E>
std::string name_of(E e, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, v] : options) {
    if (v == e) return name;
  }
  return "";
}

const std::initializer_list<std::pair<const char*, augment::MaskMode>> kMaskModes = {
    {"bernoulli", augment::MaskMode::Bernoulli}, {"quota", augment::MaskMode::Quota}};
const std::initializer_list<std::pair<const char*, scenarios::SsIncompMethod>> kSsIncomp = {
    {"auto", scenarios::SsIncompMethod::Auto},
    {"deletion", scenarios::SsIncompMethod::Deletion},
    {"search", scenarios::SsIncompMethod::Search}};
const std::initializer_list<std::pair<const char*, scenarios::TermSource>> kTerms = {
    {"question", scenarios::TermSource::Question}, {"head_entities", scenarios::TermSource::HeadEntities}};
const std::initializer_list<std::pair<const char*, eval::JudgeKind>> kJudges = {{"rule", eval::JudgeKind::Rule},
                                                                               {"llm", eval::JudgeKind::Llm}};
const std::initializer_list<std::pair<const char*, eval::RecallMode>> kRecall = {{"set", eval::RecallMode::Set},
                                                                                {"multiset", eval::RecallMode::Multiset}};
const std::initializer_list<std::pair<const char*, contrastive::Reduction>> kReductions = {
    {"sum", contrastive::Reduction::Sum}, {"mean", contrastive::Reduction::Mean}};

void read_completion(const json& j, CompletionSettings& c) {
  Section s(j, "clients.completion");
  s.get("base_url", c.base_url);
  s.get("base_url_env", c.base_url_env);
  s.get("path", c.path);
  s.get("model", c.model);
  s.get("api_key_env", c.api_key_env);
  s.get("timeout_ms", c.timeout_ms);
  s.get("max_in_flight", c.max_in_flight);
  s.get("temperature", c.temperature);
  s.finish();
  if (c.max_in_flight == 0 || c.max_in_flight > 64) throw ConfigError("config clients.completion.max_in_flight: must be 1..64");
  if (c.timeout_ms <= 0) throw ConfigError("config clients.completion.timeout_ms: must be positive");
}

void read_search(const json& j, SearchSettings& c) {
  Section s(j, "clients.search");
  s.get("base_url", c.base_url);
  s.get("base_url_env", c.base_url_env);
  s.get("engine", c.engine);
  s.get("api_key_env", c.api_key_env);
  s.get("timeout_ms", c.timeout_ms);
  s.finish();
  if (c.timeout_ms <= 0) throw ConfigError("config clients.search.timeout_ms: must be positive");
}

}  // namespace

clients::RetryPolicy ClientSettings::retry() const {
  return {max_attempts, std::chrono::milliseconds(backoff_ms), backoff_multiplier};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  Section root(j, "");

  const json* seeds = root.child("seeds");
  if (seeds == nullptr) throw ConfigError("config: 'seeds' is required (split, augment, review, pairs)");
  {
    Section s(*seeds, "seeds");
    for (const char* k : {"split", "augment", "review", "pairs"}) {
      if (!s.has(k)) throw ConfigError(std::string("config: seeds.") + k + " is required");
    }
    s.get("split", c.seeds.split);
    s.get("augment", c.seeds.augment);
    s.get("review", c.seeds.review);
    s.get("pairs", c.seeds.pairs);
    s.finish();
  }

  if (const json* d = root.child("datasets")) {
    if (!d->is_object()) throw ConfigError("config datasets: expected an object");
    for (const auto& [id, v] : d->items()) {
      Section s(v, "datasets." + id);
      DatasetSource src;
      s.get("format", src.format);
      s.get("path", src.path);
      s.finish();
      if (src.format != "squad" && src.format != "webqa") {
        throw ConfigError("config datasets." + id + ".format: expected squad or webqa");
      }
      c.datasets[id] = src;
    }
  }

  if (const json* sp = root.child("split")) {
    Section s(*sp, "split");
    s.get("n", c.split_n);
    s.finish();
    if (c.split_n % 2 != 0) throw ConfigError("config split.n: must be even");
  }

  if (const json* a = root.child("augment")) {
    Section s(*a, "augment");
    s.get("answer_span_mask_rate", c.augment.answer_span_mask_rate);
    s.get("other_span_mask_rate", c.augment.other_span_mask_rate);
    s.get("swap", c.augment.swap_enabled);
    s.get("swap_window", c.augment.swap_window);
    std::string mode = name_of(c.augment.mask_mode, kMaskModes);
    s.get("mask_mode", mode);
    c.augment.mask_mode = pick(mode, "augment.mask_mode", kMaskModes);
    s.finish();
  }
  c.augment.seed = c.seeds.augment;
  c.augment.validate();

  if (const json* sc = root.child("scenarios")) {
    Section s(*sc, "scenarios");
    auto& o = c.scenarios.options;
    if (const json* en = s.child("enabled")) {
      if (!en->is_array()) throw ConfigError("config scenarios.enabled: expected a list of scenario names");
      c.scenarios.enabled.clear();
      for (const auto& name : *en) {
        if (!name.is_string()) throw ConfigError("config scenarios.enabled: expected scenario names");
        try {
          c.scenarios.enabled.push_back(scenarios::parse_scenario(name.get<std::string>()));
        } catch (const UsageError& e) {
          throw ConfigError(std::string("config scenarios.enabled: ") + e.what());
        }
      }
    }
    std::string method = name_of(o.ssincomp_method, kSsIncomp);
    s.get("ssincomp_method", method);
    o.ssincomp_method = pick(method, "scenarios.ssincomp_method", kSsIncomp);
    s.get("min_sentences", o.min_sentences);
    s.get("search_keywords", o.search_keywords);
    s.get("search_results", o.search_results);
    std::string terms = name_of(o.msincons_terms, kTerms);
    s.get("msincons_terms", terms);
    o.msincons_terms = pick(terms, "scenarios.msincons_terms", kTerms);
    s.get("retrieval_limit", o.retrieval_limit);
    s.get("review_n", c.scenarios.review_n);
    s.finish();
    if (o.search_keywords == 0) throw ConfigError("config scenarios.search_keywords: must be positive");
    if (o.search_results == 0) throw ConfigError("config scenarios.search_results: must be positive");
    if (o.retrieval_limit == 0) throw ConfigError("config scenarios.retrieval_limit: must be positive");
  }

  if (const json* cl = root.child("clients")) {
    Section s(*cl, "clients");
    auto& k = c.clients;
    s.get("mode", k.mode);
    if (k.mode != "mock" && k.mode != "live") throw ConfigError("config clients.mode: expected mock or live");
    s.get("mock_fixtures", k.mock_fixtures);
    s.get("templates", k.templates);
    s.get("strict_triples", k.strict_triples);
    s.get("max_attempts", k.max_attempts);
    s.get("backoff_ms", k.backoff_ms);
    s.get("backoff_multiplier", k.backoff_multiplier);
    if (const json* comp = s.child("completion")) read_completion(*comp, k.completion);
    if (const json* se = s.child("search")) read_search(*se, k.search);
    s.finish();
    if (k.max_attempts == 0) throw ConfigError("config clients.max_attempts: must be positive");
    if (k.backoff_ms < 0 || k.backoff_multiplier < 1.0) {
      throw ConfigError("config clients: backoff_ms must be >= 0 and backoff_multiplier >= 1");
    }
  }

  if (const json* ev = root.child("eval")) {
    Section s(*ev, "eval");
    auto& o = c.eval.options;
    std::string judge = name_of(o.judge, kJudges);
    s.get("judge", judge);
    o.judge = pick(judge, "eval.judge", kJudges);
    s.get("rejection_phrases", o.rejection_phrases);
    std::string rec = name_of(o.recall_mode, kRecall);
    s.get("recall", rec);
    o.recall_mode = pick(rec, "eval.recall", kRecall);
    s.finish();
  }

  if (const json* co = root.child("contrastive")) {
    Section s(*co, "contrastive");
    auto& k = c.contrastive;
    s.get("target_n", k.target_n);
    std::vector<std::size_t> ratio{k.balance.correct, k.balance.incorrect};
    s.get("balance", ratio);
    if (ratio.size() != 2 || ratio[0] + ratio[1] == 0) {
      throw ConfigError("config contrastive.balance: expected [correct, incorrect], not both 0");
    }
    k.balance = {ratio[0], ratio[1]};
    s.get("refusal_phrases", k.refusal_phrases);
    if (k.refusal_phrases.empty()) throw ConfigError("config contrastive.refusal_phrases: must not be empty");
    std::string red = name_of(k.reduction, kReductions);
    s.get("reduction", red);
    k.reduction = pick(red, "contrastive.reduction", kReductions);
    s.finish();
  }

  root.finish();
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json datasets = json::object();
  for (const auto& [id, d] : c.datasets) datasets[id] = {{"format", d.format}, {"path", d.path}};
  json enabled = json::array();
  for (auto s : c.scenarios.enabled) enabled.push_back(scenarios::to_string(s));
  const auto& so = c.scenarios.options;
  const auto& k = c.clients;
  return json{
      {"seeds", {{"split", c.seeds.split}, {"augment", c.seeds.augment}, {"review", c.seeds.review}, {"pairs", c.seeds.pairs}}},
      {"datasets", datasets},
      {"split", {{"n", c.split_n}}},
      {"augment",
       {{"answer_span_mask_rate", c.augment.answer_span_mask_rate},
        {"other_span_mask_rate", c.augment.other_span_mask_rate},
        {"swap", c.augment.swap_enabled},
        {"swap_window", c.augment.swap_window},
        {"mask_mode", name_of(c.augment.mask_mode, kMaskModes)}}},
      {"scenarios",
       {{"enabled", enabled},
        {"ssincomp_method", name_of(so.ssincomp_method, kSsIncomp)},
        {"min_sentences", so.min_sentences},
        {"search_keywords", so.search_keywords},
        {"search_results", so.search_results},
        {"msincons_terms", name_of(so.msincons_terms, kTerms)},
        {"retrieval_limit", so.retrieval_limit},
        {"review_n", c.scenarios.review_n}}},
      {"clients",
       {{"mode", k.mode},
        {"mock_fixtures", k.mock_fixtures},
        {"templates", k.templates},
        {"strict_triples", k.strict_triples},
        {"max_attempts", k.max_attempts},
        {"backoff_ms", k.backoff_ms},
        {"backoff_multiplier", k.backoff_multiplier},
        {"completion",
         {{"base_url", k.completion.base_url},
          {"base_url_env", k.completion.base_url_env},
          {"path", k.completion.path},
          {"model", k.completion.model},
          {"api_key_env", k.completion.api_key_env},
          {"timeout_ms", k.completion.timeout_ms},
          {"max_in_flight", k.completion.max_in_flight},
          {"temperature", k.completion.temperature}}},
        {"search",
         {{"base_url", k.search.base_url},
          {"base_url_env", k.search.base_url_env},
          {"engine", k.search.engine},
          {"api_key_env", k.search.api_key_env},
          {"timeout_ms", k.search.timeout_ms}}}}},
      {"eval",
       {{"judge", name_of(c.eval.options.judge, kJudges)},
        {"rejection_phrases", c.eval.options.rejection_phrases},
        {"recall", name_of(c.eval.options.recall_mode, kRecall)}}},
      {"contrastive",
       {{"target_n", c.contrastive.target_n},
        {"balance", {c.contrastive.balance.correct, c.contrastive.balance.incorrect}},
        {"refusal_phrases", c.contrastive.refusal_phrases},
        {"reduction", name_of(c.contrastive.reduction, kReductions)}}}};
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace robustqa
