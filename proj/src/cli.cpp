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

#include "robustqa/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "robustqa/augment.hpp"
#include "robustqa/clients.hpp"
#include "robustqa/config.hpp"
#include "robustqa/contrastive.hpp"
#include "robustqa/corpus.hpp"
#include "robustqa/eval.hpp"
#include "robustqa/log.hpp"
#include "robustqa/scenarios.hpp"
#include "robustqa/triples.hpp"

namespace robustqa::cli {

namespace fs = std::filesystem;
using scenarios::Scenario;
using scenarios::ScenarioSample;

namespace {

struct Globals {
  std::string config_path;
  std::string log_level = "warn";
};

// Relative paths in a config file are taken relative to the file.
std::optional<PipelineConfig> maybe_config(const Globals& g) {
  if (g.config_path.empty()) return std::nullopt;
  PipelineConfig c = load_config(g.config_path);
  const fs::path base = fs::path(g.config_path).parent_path();
  auto anchor = [&base](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  anchor(c.clients.mock_fixtures);
  anchor(c.clients.templates);
  for (auto& [id, src] : c.datasets) anchor(src.path);
  return c;
}

PipelineConfig config_or_defaults(const Globals& g) {
  auto c = maybe_config(g);
  return c ? *c : PipelineConfig{};
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const std::optional<PipelineConfig>& cfg,
                           std::uint64_t Seeds::*member, const char* name) {
  if (flag) return *flag;
  if (cfg) return cfg->seeds.*member;
  throw ConfigError(std::string("no ") + name + " seed: pass --config (seeds." + name + ") or --seed");
}

std::vector<QARecord> read_records(const std::vector<std::string>& paths) {
  std::vector<QARecord> out;
  for (const auto& p : paths) {
    auto part = read_jsonl<QARecord>(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<ScenarioSample> read_samples(const std::vector<std::string>& paths) {
  std::vector<ScenarioSample> out;
  for (const auto& p : paths) {
    auto part = read_jsonl<ScenarioSample>(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<Scenario> parse_scenario_list(const std::string& s) {
  if (s == "all") return {scenarios::kAllScenarios.begin(), scenarios::kAllScenarios.end()};
  std::vector<Scenario> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = s.substr(start, comma - start);
    if (!item.empty()) out.push_back(scenarios::parse_scenario(item));
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("--scenario: no scenarios named");
  return out;
}

std::string env_or(const std::string& var, const std::string& fallback) {
  if (var.empty()) return fallback;
  const char* v = std::getenv(var.c_str());
  return v && *v ? std::string(v) : fallback;
}

// Owns whatever clients a command needs.
struct ClientBundle {
  clients::TemplateSet templates = clients::TemplateSet::defaults();
  std::unique_ptr<clients::CompletionClient> completion;
  std::unique_ptr<clients::CompletionClient> traced;
  std::unique_ptr<clients::SearchClient> search;
  std::optional<clients::ClientContext> ctx;

  clients::ClientContext* context() { return ctx ? &*ctx : nullptr; }
};

ClientBundle make_clients(const ClientSettings& settings, const std::string& trace_path, bool need_completion,
                          bool want_search) {
  ClientBundle b;
  if (!settings.templates.empty()) b.templates.load_overrides(settings.templates);
  if (settings.mode == "mock") {
    if (settings.mock_fixtures.empty()) {
      if (need_completion) throw ConfigError("mock clients need --mock-fixtures (or clients.mock_fixtures)");
    } else {
      const fs::path dir(settings.mock_fixtures);
      if (!fs::is_directory(dir)) throw ConfigError("mock fixture directory not found: " + dir.string());
      if (fs::exists(dir / "completions.jsonl")) {
        b.completion = clients::MockCompletionClient::from_jsonl(dir / "completions.jsonl");
      } else if (need_completion) {
        throw ConfigError("missing mock fixture " + (dir / "completions.jsonl").string());
      }
      if (want_search && fs::exists(dir / "search.jsonl")) {
        b.search = clients::MockSearchClient::from_jsonl(dir / "search.jsonl");
      }
    }
  } else {
    if (need_completion) {
      clients::HttpCompletionOptions o;
      o.base_url = env_or(settings.completion.base_url_env, settings.completion.base_url);
      o.path = settings.completion.path;
      o.model = settings.completion.model;
      o.api_key = env_or(settings.completion.api_key_env, "");
      if (o.api_key.empty()) throw ConfigError("environment variable " + settings.completion.api_key_env + " is not set");
      o.timeout = std::chrono::milliseconds(settings.completion.timeout_ms);
      o.max_in_flight = settings.completion.max_in_flight;
      o.temperature = settings.completion.temperature;
      b.completion = std::make_unique<clients::HttpCompletionClient>(o);
    }
    if (want_search) {
      clients::SerpApiOptions o;
      o.base_url = env_or(settings.search.base_url_env, settings.search.base_url);
      o.engine = settings.search.engine;
      o.api_key = env_or(settings.search.api_key_env, "");
      o.timeout = std::chrono::milliseconds(settings.search.timeout_ms);
      if (!o.api_key.empty()) {
        b.search = std::make_unique<clients::SerpApiSearchClient>(o);
      } else {
        log::warn("environment variable " + settings.search.api_key_env + " is not set; web search disabled");
      }
    }
  }
  if (b.completion) {
    clients::CompletionClient* active = b.completion.get();
    if (!trace_path.empty()) {
      b.traced = std::make_unique<clients::TracingCompletionClient>(*b.completion, trace_path);
      active = b.traced.get();
    }
    b.ctx.emplace(clients::ClientContext{*active, b.templates, settings.retry(), settings.strict_triples});
  }
  return b;
}

void summary(std::ostream& out, json j) { out << j.dump() << "\n"; }

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string format;
  std::string input;
  std::string dataset;
  std::string out_dir;
};

void cmd_ingest(const Globals& g, const IngestArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  std::string format = a.format;
  std::string input = a.input;
  std::string dataset = a.dataset.empty() ? format : a.dataset;
  if (input.empty()) {
    if (!cfg || !cfg->datasets.count(dataset)) {
      throw UsageError("ingest: --input is required unless the config lists dataset '" + dataset + "'");
    }
    input = cfg->datasets.at(dataset).path;
    if (format.empty()) format = cfg->datasets.at(dataset).format;
  }
  if (format.empty()) throw UsageError("ingest: --format is required");
  if (dataset.empty()) dataset = format;
  IngestResult res;
  if (format == "squad") {
    res = ingest_squad(fs::path(input), dataset);
  } else if (format == "webqa") {
    res = ingest_webqa(fs::path(input), dataset);
  } else {
    throw UsageError("ingest: --format must be squad or webqa");
  }
  for (const auto& w : res.warnings) log::warn(w.location + ": " + w.message);
  const std::string payload = to_jsonl(res.records);
  const fs::path dir(a.out_dir);
  write_text_file(dir / (dataset + ".jsonl"), payload);
  const auto manifest = make_manifest(dataset, res.records, 0, fs::proximate(input, dir).generic_string(), payload);
  write_text_file(dir / (dataset + ".manifest.json"), json(manifest).dump(2) + "\n");
  summary(out, {{"command", "ingest"},
                {"dataset", dataset},
                {"records", res.records.size()},
                {"warnings", res.warnings.size()},
                {"output", (dir / (dataset + ".jsonl")).string()}});
}

struct SplitArgs {
  std::vector<std::string> records;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void cmd_split(const Globals& g, const SplitArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  const std::uint64_t seed = resolve_seed(a.seed, cfg, &Seeds::split, "split");
  const std::size_t n = a.n ? *a.n : (cfg ? cfg->split_n : PipelineConfig{}.split_n);
  const auto records = read_records(a.records);
  if (n > records.size()) {
    throw DataError("split: n=" + std::to_string(n) + " exceeds the " + std::to_string(records.size()) + " records");
  }
  const auto res = sample_split(records, n, seed);
  const fs::path dir(a.out_dir);
  const std::string dev = to_jsonl(res.dev);
  const std::string test = to_jsonl(res.test);
  write_text_file(dir / "dev.jsonl", dev);
  write_text_file(dir / "test.jsonl", test);
  std::vector<QARecord> all = res.dev;
  all.insert(all.end(), res.test.begin(), res.test.end());
  const std::string dataset = records.empty() ? "" : records.front().dataset_id;
  const std::string source = a.records.empty() ? "" : fs::proximate(a.records.front(), dir).generic_string();
  const auto manifest = make_manifest(dataset, all, seed, source, dev + test);
  write_text_file(dir / "manifest.json", json(manifest).dump(2) + "\n");
  summary(out, {{"command", "split"}, {"seed", seed}, {"dev", res.dev.size()}, {"test", res.test.size()}});
}

struct IndexArgs {
  std::string triples;
  std::string lang = "en";
  std::string out;
};

void cmd_index(const IndexArgs& a, std::ostream& out) {
  std::vector<triples::Triple> ts;
  if (fs::path(a.triples).extension() == ".jsonl") {
    ts = read_jsonl<triples::Triple>(a.triples);
  } else {
    ts = triples::read_triples_tsv(a.triples);
  }
  const auto index = triples::TripleIndex::build(std::move(ts), parse_language(a.lang));
  index.save(a.out);
  summary(out, {{"command", "index"},
                {"triples", index.size()},
                {"vocabulary", index.vocabulary_size()},
                {"output", a.out}});
}

struct ClientArgs {
  std::string mock_fixtures;
  std::string trace;
  std::string mode;
};

ClientSettings client_settings(const PipelineConfig& cfg, const ClientArgs& a) {
  ClientSettings s = cfg.clients;
  if (!a.mock_fixtures.empty()) {
    s.mock_fixtures = a.mock_fixtures;
    s.mode = "mock";
  }
  if (!a.mode.empty()) {
    if (a.mode != "mock" && a.mode != "live") throw UsageError("--clients must be mock or live");
    s.mode = a.mode;
  }
  return s;
}

struct BuildArgs {
  std::vector<std::string> records;
  std::string scenario;
  std::string index;
  std::string out_dir;
  std::string ssincomp_method;
  ClientArgs clients;
};

void cmd_build(const Globals& g, const BuildArgs& a, std::ostream& out) {
  const PipelineConfig cfg = config_or_defaults(g);
  const auto enabled_list = a.scenario.empty() ? cfg.scenarios.enabled : parse_scenario_list(a.scenario);
  const std::set<Scenario> enabled(enabled_list.begin(), enabled_list.end());
  scenarios::ScenarioOptions options = cfg.scenarios.options;
  if (!a.ssincomp_method.empty()) {
    if (a.ssincomp_method == "auto") {
      options.ssincomp_method = scenarios::SsIncompMethod::Auto;
    } else if (a.ssincomp_method == "deletion") {
      options.ssincomp_method = scenarios::SsIncompMethod::Deletion;
    } else if (a.ssincomp_method == "search") {
      options.ssincomp_method = scenarios::SsIncompMethod::Search;
    } else {
      throw UsageError("--ssincomp-method must be auto, deletion or search");
    }
  }
  const bool need_completion = enabled.count(Scenario::MSCons) || enabled.count(Scenario::MSConf) ||
                               (enabled.count(Scenario::MSIncons) &&
                                options.msincons_terms == scenarios::TermSource::HeadEntities);
  ClientBundle bundle =
      make_clients(client_settings(cfg, a.clients), a.clients.trace, need_completion, enabled.count(Scenario::SSIncomp) > 0);

  std::optional<triples::TripleIndex> index;
  if (!a.index.empty()) {
    index = triples::TripleIndex::load(a.index);
  } else if (enabled.count(Scenario::MSIncons)) {
    throw UsageError("build: MSIncons needs --index");
  }

  const auto records = read_records(a.records);
  // Group by (dataset, split), keeping first-seen order.
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<QARecord>> groups;
  for (const auto& r : records) {
    std::pair<std::string, std::string> key{r.dataset_id, r.split ? std::string(to_string(*r.split)) : "all"};
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(r);
  }

  scenarios::BuildResources res{bundle.context(), bundle.search.get(), index ? &*index : nullptr,
                                cfg.clients.retry()};
  json counts = json::object();
  std::size_t violations = 0;
  std::string first_violation;
  for (const auto& key : keys) {
    const auto built = scenarios::build_all(groups[key], enabled, options, res);
    const fs::path dir = fs::path(a.out_dir) / key.first / key.second;
    for (const auto& [s, samples] : built.samples) {
      for (const auto& v : scenarios::validate_samples(samples, options.retrieval_limit)) {
        if (violations++ == 0) first_violation = v.sample_id + ": " + v.message;
      }
      write_jsonl(dir / (std::string(scenarios::to_string(s)) + ".jsonl"), samples);
    }
    write_text_file(dir / "build_report.json", json(built.report).dump(2) + "\n");
    for (const auto& [s, c] : built.report.scenarios) {
      json& slot = counts[std::string(scenarios::to_string(s))];
      if (slot.is_null()) slot = {{"built", 0}, {"skipped", 0}, {"failed", 0}};
      slot["built"] = slot["built"].get<std::size_t>() + c.built;
      slot["skipped"] = slot["skipped"].get<std::size_t>() + c.skipped;
      slot["failed"] = slot["failed"].get<std::size_t>() + c.failed;
    }
  }
  if (violations > 0) {
    throw DataError("build: " + std::to_string(violations) + " invariant violations, first: " + first_violation);
  }
  summary(out, {{"command", "build"}, {"records", records.size()}, {"scenarios", counts}, {"output", a.out_dir}});
}

struct AugmentArgs {
  std::vector<std::string> records;
  std::optional<std::uint64_t> seed;
  std::optional<double> rate;
  bool no_swap = false;
  std::string out;
};

void cmd_augment(const Globals& g, const AugmentArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  augment::AugmentConfig ac = cfg ? cfg->augment : augment::AugmentConfig{};
  ac.seed = resolve_seed(a.seed, cfg, &Seeds::augment, "augment");
  if (a.rate) ac.answer_span_mask_rate = *a.rate;
  if (a.no_swap) ac.swap_enabled = false;
  ac.validate();
  const auto records = read_records(a.records);
  const auto examples = augment::build_training_set(records, ac);
  write_jsonl(a.out, examples);
  std::size_t masked = 0;
  std::size_t swapped = 0;
  for (const auto& ex : examples) {
    bool m = false;
    bool s = false;
    for (const auto& op : ex.applied_ops) (op.kind == augment::AugmentOp::Kind::Mask ? m : s) = true;
    masked += m;
    swapped += s;
  }
  summary(out, {{"command", "augment"},
                {"records", examples.size()},
                {"masked", masked},
                {"swapped", swapped},
                {"seed", ac.seed},
                {"output", a.out}});
}

struct EvalArgs {
  std::vector<std::string> samples;
  std::string outputs;
  std::string out_dir;
  std::string model;
  std::string judge;
  ClientArgs clients;
};

void cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  const PipelineConfig cfg = config_or_defaults(g);
  eval::EvalOptions options = cfg.eval.options;
  if (a.judge == "rule") {
    options.judge = eval::JudgeKind::Rule;
  } else if (a.judge == "llm") {
    options.judge = eval::JudgeKind::Llm;
  } else if (!a.judge.empty()) {
    throw UsageError("--judge must be rule or llm");
  }
  const bool llm = options.judge == eval::JudgeKind::Llm;
  ClientBundle bundle = make_clients(client_settings(cfg, a.clients), a.clients.trace, llm, false);

  const auto samples = read_samples(a.samples);
  const auto outputs = read_jsonl<eval::ModelOutput>(a.outputs);
  const auto judged = eval::judge_outputs(samples, outputs, options, bundle.context());

  std::set<Scenario> present;
  for (const auto& s : samples) present.insert(s.scenario);
  std::set<Scenario> answered;
  for (const auto& j : judged) answered.insert(j.scenario);
  for (Scenario s : present) {
    if (!answered.count(s)) throw DataError("eval: scenario " + std::string(scenarios::to_string(s)) + " has no outputs");
  }
  const std::string judge_name = llm ? "llm:" + bundle.ctx->client.model_name() : "rule";
  const auto report = eval::aggregate(judged, a.model, judge_name);
  const fs::path dir(a.out_dir);
  write_jsonl(dir / "judged.jsonl", judged);
  write_text_file(dir / "report.json", eval::render_report(report, eval::ReportFormat::Json));
  write_text_file(dir / "report.txt", eval::render_report(report, eval::ReportFormat::Text));
  summary(out, {{"command", "eval"},
                {"outputs", judged.size()},
                {"overall_acc", report.overall_acc},
                {"overall_wscore", report.overall_wscore},
                {"output", a.out_dir}});
}

struct PairsArgs {
  std::vector<std::string> samples;
  std::string judged;
  std::optional<std::size_t> target;
  std::string balance;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string training_dir;
  std::string lang = "en";
};

contrastive::Balance parse_balance(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--balance must look like 1:1, got '" + s + "'");
  }
}

void cmd_pairs(const Globals& g, const PairsArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  const ContrastiveSettings cs = cfg ? cfg->contrastive : ContrastiveSettings{};
  const std::uint64_t seed = resolve_seed(a.seed, cfg, &Seeds::pairs, "pairs");
  const std::size_t target = a.target ? *a.target : cs.target_n;
  const contrastive::Balance balance = a.balance.empty() ? cs.balance : parse_balance(a.balance);

  const auto all_samples = read_samples(a.samples);
  std::map<std::string, const ScenarioSample*> by_id;
  for (const auto& s : all_samples) by_id.emplace(s.id, &s);
  const auto judged = read_jsonl<eval::JudgedOutput>(a.judged);
  std::vector<ScenarioSample> samples;
  std::vector<Verdict> verdicts;
  std::vector<std::string> outputs;
  for (const auto& j : judged) {
    auto it = by_id.find(j.sample_id);
    if (it == by_id.end()) throw DataError("pairs: judged output for unknown sample '" + j.sample_id + "'");
    samples.push_back(*it->second);
    verdicts.push_back(j.verdict);
    outputs.push_back(j.model_output);
  }
  const auto pairs = contrastive::build_pairs(samples, verdicts, outputs, cs.refusal_phrases, target, balance, seed);
  contrastive::export_pairs(pairs, a.out);
  if (!a.training_dir.empty()) {
    const auto tf = contrastive::tokenize_for_training(pairs, parse_language(a.lang));
    write_text_file(fs::path(a.training_dir) / "train.jsonl", tf.records_jsonl);
    write_text_file(fs::path(a.training_dir) / "vocab.json", tf.vocab_json);
  }
  std::size_t from_correct = 0;
  for (const auto& p : pairs) from_correct += p.origin == contrastive::Origin::FromCorrect;
  summary(out, {{"command", "pairs"},
                {"pairs", pairs.size()},
                {"from_correct", from_correct},
                {"from_incorrect", pairs.size() - from_correct},
                {"seed", seed},
                {"output", a.out}});
}

struct LossArgs {
  std::string batch;
  double h = 1e-6;
  double tolerance = 1e-5;
  std::string reduction;
};

void cmd_loss_check(const Globals& g, const LossArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  contrastive::Reduction reduction = cfg ? cfg->contrastive.reduction : contrastive::Reduction::Sum;
  if (a.reduction == "sum") {
    reduction = contrastive::Reduction::Sum;
  } else if (a.reduction == "mean") {
    reduction = contrastive::Reduction::Mean;
  } else if (!a.reduction.empty()) {
    throw UsageError("--reduction must be sum or mean");
  }
  json doc;
  try {
    doc = json::parse(read_text_file(a.batch));
  } catch (const json::exception& e) {
    throw DataError(a.batch + ": not valid JSON: " + e.what());
  }
  const json& arr = doc.is_object() ? require<json>(doc, "pairs") : doc;
  std::vector<contrastive::TokenLogProbs> batch;
  try {
    batch = arr.get<std::vector<contrastive::TokenLogProbs>>();
  } catch (const json::exception& e) {
    throw DataError(a.batch + ": expected a list of {chosen_logps, rejected_logps}: " + e.what());
  }
  try {
    contrastive::validate_batch(batch);
  } catch (const std::invalid_argument& e) {
    throw DataError(a.batch + ": " + e.what());
  }
  const auto result = contrastive::contrastive_loss(batch, reduction);
  const auto check = contrastive::finite_difference_check(batch, a.h, reduction);
  json j = result;
  j["command"] = "loss-check";
  j["residual"] = check.max_relative_residual;
  j["absolute_residual"] = check.max_absolute_residual;
  j["tolerance"] = a.tolerance;
  summary(out, j);
  if (!(check.max_relative_residual < a.tolerance)) {
    throw DataError("loss-check: finite-difference residual " + std::to_string(check.max_relative_residual) +
                    " exceeds tolerance");
  }
}

struct ReportArgs {
  std::string from;
  std::string format = "text";
  std::string out;
};

void cmd_report(const ReportArgs& a, std::ostream& out) {
  json doc;
  try {
    doc = json::parse(read_text_file(a.from));
  } catch (const json::exception& e) {
    throw DataError(a.from + ": not valid JSON: " + e.what());
  }
  std::vector<eval::EvalReport> reports;
  if (doc.is_object() && doc.contains("rows")) {
    reports = eval::reports_from_rates(doc);
  } else if (doc.is_array()) {
    reports = doc.get<std::vector<eval::EvalReport>>();
  } else {
    reports.push_back(doc.get<eval::EvalReport>());
  }
  eval::ReportFormat format;
  if (a.format == "text") {
    format = eval::ReportFormat::Text;
  } else if (a.format == "json") {
    format = eval::ReportFormat::Json;
  } else {
    throw UsageError("--format must be text or json");
  }
  const std::string rendered = eval::render_reports(reports, format);
  if (a.out.empty()) {
    out << rendered;
    return;
  }
  write_text_file(a.out, rendered);
  json rows = json::array();
  for (const auto& r : reports) {
    rows.push_back({{"model", r.model}, {"overall_acc", r.overall_acc}, {"overall_wscore", r.overall_wscore}});
  }
  summary(out, {{"command", "report"}, {"rows", rows}});
}

struct ReviewExportArgs {
  std::vector<std::string> samples;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_review_export(const Globals& g, const ReviewExportArgs& a, std::ostream& out) {
  const auto cfg = maybe_config(g);
  const std::uint64_t seed = resolve_seed(a.seed, cfg, &Seeds::review, "review");
  const std::size_t n = a.n ? *a.n : (cfg ? cfg->scenarios.review_n : ScenarioSettings{}.review_n);
  const auto samples = read_samples(a.samples);
  if (n > samples.size()) {
    throw DataError("review-export: n=" + std::to_string(n) + " exceeds the " + std::to_string(samples.size()) +
                    " samples");
  }
  write_text_file(a.out, scenarios::export_review(samples, n, seed));
  summary(out, {{"command", "review-export"}, {"rows", n}, {"seed", seed}, {"output", a.out}});
}

struct ReviewImportArgs {
  std::vector<std::string> samples;
  std::string review;
  std::string out;
};

void cmd_review_import(const ReviewImportArgs& a, std::ostream& out) {
  const auto samples = read_samples(a.samples);
  const auto kept = scenarios::import_review(samples, read_text_file(a.review));
  write_jsonl(a.out, kept);
  summary(out, {{"command", "review-import"},
                {"kept", kept.size()},
                {"dropped", samples.size() - kept.size()},
                {"output", a.out}});
}

log::Level parse_level(const std::string& s) {
  if (s == "debug") return log::Level::Debug;
  if (s == "info") return log::Level::Info;
  if (s == "warn") return log::Level::Warn;
  if (s == "error") return log::Level::Error;
  if (s == "off") return log::Level::Off;
  throw UsageError("--log-level must be debug, info, warn, error or off");
}

void add_client_flags(CLI::App* cmd, ClientArgs& c) {
  cmd->add_option("--mock-fixtures", c.mock_fixtures, "Directory with completions.jsonl / search.jsonl (forces mock clients)");
  cmd->add_option("--clients", c.mode, "Client mode override: mock or live");
  cmd->add_option("--trace", c.trace, "Append every prompt and raw reply to this audit JSONL file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robustness evaluation datasets and training pairs for retrieval-augmented QA", "robustqa"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON)");
  app.add_option("--log-level", g.log_level, "debug, info, warn, error or off")->capture_default_str();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert a SQuAD or WebQA file into QA records");
  c_ingest->add_option("--format", ingest.format, "squad or webqa");
  c_ingest->add_option("--input", ingest.input, "Source file (default: the config's dataset path)");
  c_ingest->add_option("--dataset", ingest.dataset, "Dataset id (default: the format name)");
  c_ingest->add_option("--out-dir", ingest.out_dir, "Writes <dataset>.jsonl and <dataset>.manifest.json")->required();

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Sample n records and halve them into dev and test");
  c_split->add_option("--records", split.records, "QA record JSONL files")->required();
  c_split->add_option("--n", split.n, "Records to sample, even (default: split.n, 500)");
  c_split->add_option("--seed", split.seed, "Override seeds.split");
  c_split->add_option("--out-dir", split.out_dir, "Writes dev.jsonl, test.jsonl, manifest.json")->required();

  IndexArgs index;
  auto* c_index = app.add_subcommand("index", "Build a triple index from a TSV (head, relation, tail) or JSONL file");
  c_index->add_option("--triples", index.triples, "Triples file (.tsv or .jsonl)")->required();
  c_index->add_option("--lang", index.lang, "Tokenization language: en or zh")->capture_default_str();
  c_index->add_option("--out", index.out, "Index JSON output")->required();

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build scenario datasets from QA records");
  c_build->add_option("--records", build.records, "QA record JSONL files")->required();
  c_build->add_option("--scenario", build.scenario, "all or a comma list of SS,SSIncomp,MSCons,MSIncons,MSConf");
  c_build->add_option("--index", build.index, "Triple index (needed for MSIncons)");
  c_build->add_option("--ssincomp-method", build.ssincomp_method, "auto, deletion or search");
  c_build->add_option("--out", build.out_dir, "Writes <out>/<dataset>/<split>/<scenario>.jsonl and build_report.json")
      ->required();
  add_client_flags(c_build, build.clients);

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "Mask spans and swap words to build training contexts");
  c_aug->add_option("--records", aug.records, "QA record JSONL files")->required();
  c_aug->add_option("--seed", aug.seed, "Override seeds.augment");
  c_aug->add_option("--rate", aug.rate, "Override augment.answer_span_mask_rate");
  c_aug->add_flag("--no-swap", aug.no_swap, "Disable word swapping");
  c_aug->add_option("--out", aug.out, "Augmented JSONL output")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Judge model outputs and aggregate ACC / WSCORE per scenario");
  c_eval->add_option("--samples", ev.samples, "Scenario sample JSONL files")->required();
  c_eval->add_option("--outputs", ev.outputs, "JSONL of {sample_id, scenario, model_output}")->required();
  c_eval->add_option("--out-dir", ev.out_dir, "Writes judged.jsonl, report.json, report.txt")->required();
  c_eval->add_option("--model", ev.model, "Model name for the report");
  c_eval->add_option("--judge", ev.judge, "rule or llm (default: eval.judge)");
  add_client_flags(c_eval, ev.clients);

  PairsArgs pairs;
  auto* c_pairs = app.add_subcommand("pairs", "Build chosen/rejected preference pairs from judged outputs");
  c_pairs->add_option("--samples", pairs.samples, "Scenario sample JSONL files")->required();
  c_pairs->add_option("--judged", pairs.judged, "judged.jsonl from eval")->required();
  c_pairs->add_option("--target", pairs.target, "Number of pairs (default: contrastive.target_n, 3500)");
  c_pairs->add_option("--balance", pairs.balance, "correct:incorrect ratio (default: contrastive.balance, 1:1)");
  c_pairs->add_option("--seed", pairs.seed, "Override seeds.pairs");
  c_pairs->add_option("--out", pairs.out, "Pair JSONL output")->required();
  c_pairs->add_option("--training-dir", pairs.training_dir, "Also write token-id train.jsonl and vocab.json here");
  c_pairs->add_option("--lang", pairs.lang, "Tokenization language for --training-dir")->capture_default_str();

  LossArgs loss;
  auto* c_loss = app.add_subcommand("loss-check", "Contrastive loss, gradients and finite-difference residual");
  c_loss->add_option("--batch", loss.batch, "JSON list (or {\"pairs\": [...]}) of {chosen_logps, rejected_logps}")
      ->required();
  c_loss->add_option("--step", loss.h, "Central-difference step")->capture_default_str();
  c_loss->add_option("--tolerance", loss.tolerance, "Maximum relative residual")->capture_default_str();
  c_loss->add_option("--reduction", loss.reduction, "sum or mean (default: contrastive.reduction)");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Render a results table from a report or a rates fixture");
  c_rep->add_option("--from", rep.from, "report.json, a list of reports, or {\"rows\": [...]} in percent")->required();
  c_rep->add_option("--format", rep.format, "text or json")->capture_default_str();
  c_rep->add_option("--out", rep.out, "Write the table here instead of stdout");

  auto* c_cfg = app.add_subcommand("config", "Print the resolved config with all defaults");

  ReviewExportArgs rex;
  auto* c_rex = app.add_subcommand("review-export", "Export a seeded sample of scenario samples for human review");
  c_rex->add_option("--samples", rex.samples, "Scenario sample JSONL files")->required();
  c_rex->add_option("--n", rex.n, "Rows (default: scenarios.review_n, 100)");
  c_rex->add_option("--seed", rex.seed, "Override seeds.review");
  c_rex->add_option("--out", rex.out, "TSV output")->required();

  ReviewImportArgs rim;
  auto* c_rim = app.add_subcommand("review-import", "Drop the samples a reviewer marked bad");
  c_rim->add_option("--samples", rim.samples, "Scenario sample JSONL files")->required();
  c_rim->add_option("--review", rim.review, "Edited review TSV")->required();
  c_rim->add_option("--out", rim.out, "Filtered sample JSONL output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  try {
    log::set_level(parse_level(g.log_level));
    if (c_ingest->parsed()) cmd_ingest(g, ingest, out);
    if (c_split->parsed()) cmd_split(g, split, out);
    if (c_index->parsed()) cmd_index(index, out);
    if (c_build->parsed()) cmd_build(g, build, out);
    if (c_aug->parsed()) cmd_augment(g, aug, out);
    if (c_eval->parsed()) cmd_eval(g, ev, out);
    if (c_pairs->parsed()) cmd_pairs(g, pairs, out);
    if (c_loss->parsed()) cmd_loss_check(g, loss, out);
    if (c_rep->parsed()) cmd_report(rep, out);
    if (c_cfg->parsed()) {
      const PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
      out << config_to_json(cfg).dump(2) << "\n";
    }
    if (c_rex->parsed()) cmd_review_export(g, rex, out);
    if (c_rim->parsed()) cmd_review_import(rim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Data);
  }
  return 0;
}

}  // namespace robustqa::cli
