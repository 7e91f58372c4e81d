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

#include "robustqa/clients.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "robustqa/text.hpp"

namespace robustqa {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Wrong:
      return "wrong";
    case Verdict::Correct:
      return "correct";
    case Verdict::Rejected:
      return "rejected";
  }
  return "wrong";
}

Verdict parse_verdict(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "wrong" || lower == "w") return Verdict::Wrong;
  if (lower == "correct" || lower == "c") return Verdict::Correct;
  if (lower == "rejected" || lower == "r") return Verdict::Rejected;
  throw DataError("unknown verdict '" + std::string(s) + "'");
}

}  // namespace robustqa

namespace robustqa::clients {

namespace {

std::string trim_copy(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

MockCompletionClient::Entry parse_entry(const json& j) {
  MockCompletionClient::Entry e;
  e.reply = j.value("reply", "");
  e.refusal = j.value("refusal", false);
  e.transport_error = j.contains("error");
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mocks

std::unique_ptr<MockCompletionClient> MockCompletionClient::from_jsonl(const std::filesystem::path& path) {
  return from_jsonl_text(read_text_file(path), path.string());
}

std::unique_ptr<MockCompletionClient> MockCompletionClient::from_jsonl_text(std::string_view content, const std::string& origin) {
  auto mock = std::make_unique<MockCompletionClient>();
  std::size_t line_no = 0;
  for (const auto& j : parse_jsonl<json>(content, origin)) {
    ++line_no;
    if (!j.is_object() || !j.contains("template") || !j["template"].is_string()) {
      throw DataError(origin + ": fixture entry " + std::to_string(line_no) + " lacks 'template'");
    }
    std::optional<std::string> hash;
    if (j.contains("prompt_sha256") && !j["prompt_sha256"].is_null()) hash = j["prompt_sha256"].get<std::string>();
    mock->add(j["template"].get<std::string>(), hash, parse_entry(j));
  }
  return mock;
}

void MockCompletionClient::add(const std::string& template_name, std::optional<std::string> prompt_sha256,
                               Entry entry) {
  if (prompt_sha256) {
    by_hash_[{template_name, *prompt_sha256}] = std::move(entry);
  } else {
    defaults_[template_name] = std::move(entry);
  }
}

ChatReply MockCompletionClient::complete(const ChatRequest& request) {
  ++calls_;
  const std::string hash = sha256_hex(request.user);
  const Entry* entry = nullptr;
  if (auto it = by_hash_.find({request.template_name, hash}); it != by_hash_.end()) {
    entry = &it->second;
  } else if (auto d = defaults_.find(request.template_name); d != defaults_.end()) {
    entry = &d->second;
  }
  if (entry == nullptr) {
    throw TransportError("mock: no canned reply for template '" + request.template_name + "' (prompt sha256 " +
                         hash + ")");
  }
  if (entry->transport_error) throw TransportError("mock: injected transport error");
  return {entry->refusal ? ChatReply::Kind::Refusal : ChatReply::Kind::Text, entry->reply};
}

TracingCompletionClient::TracingCompletionClient(CompletionClient& inner, const std::filesystem::path& audit_path)
    : inner_(inner) {
  if (audit_path.has_parent_path()) std::filesystem::create_directories(audit_path.parent_path());
  out_.open(audit_path, std::ios::app);
  if (!out_) throw DataError("cannot open trace file " + audit_path.string());
}

ChatReply TracingCompletionClient::complete(const ChatRequest& request) {
  json rec{{"template", request.template_name},
           {"prompt_sha256", sha256_hex(request.user)},
           {"system", request.system},
           {"prompt", request.user}};
  try {
    ChatReply reply = inner_.complete(request);
    rec["reply"] = reply.text;
    rec["refusal"] = reply.kind == ChatReply::Kind::Refusal;
    std::lock_guard<std::mutex> lock(mu_);
    out_ << rec.dump() << '\n';
    out_.flush();
    return reply;
  } catch (const std::exception& e) {
    rec["error"] = e.what();
    std::lock_guard<std::mutex> lock(mu_);
    out_ << rec.dump() << '\n';
    out_.flush();
    throw;
  }
}

void to_json(json& j, const SearchResult& r) { j = json{{"title", r.title}, {"snippet", r.snippet}, {"url", r.url}}; }

void from_json(const json& j, SearchResult& r) {
  r.title = j.value("title", "");
  r.snippet = require<std::string>(j, "snippet");
  r.url = j.value("url", "");
}

std::unique_ptr<MockSearchClient> MockSearchClient::from_jsonl(const std::filesystem::path& path) {
  return from_jsonl_text(read_text_file(path), path.string());
}

std::unique_ptr<MockSearchClient> MockSearchClient::from_jsonl_text(std::string_view content, const std::string& origin) {
  auto mock = std::make_unique<MockSearchClient>();
  for (const auto& j : parse_jsonl<json>(content, origin)) {
    mock->add(require<std::string>(j, "query"), j.value("results", std::vector<SearchResult>{}), j.contains("error"));
  }
  return mock;
}

void MockSearchClient::add(const std::string& query, std::vector<SearchResult> results, bool transport_error) {
  entries_[query] = Entry{std::move(results), transport_error};
}

std::vector<SearchResult> MockSearchClient::search(const std::string& query, std::size_t cap) {
  ++calls_;
  auto it = entries_.find(query);
  if (it == entries_.end()) it = entries_.find("*");
  if (it == entries_.end()) return {};
  if (it->second.transport_error) throw TransportError("mock search: injected transport error");
  std::vector<SearchResult> out;
  for (const auto& r : it->second.results) {
    if (out.size() == cap) break;
    if (!r.snippet.empty()) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Templates

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      return out;
    }
    const auto close = text.find("}}", open + 2);
    if (close == std::string::npos) throw ConfigError("template '" + name + "': unterminated placeholder");
    out.append(text, pos, open - pos);
    const std::string key = text.substr(open + 2, close - open - 2);
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("template '" + name + "': missing value for {{" + key + "}}");
    out += it->second;
    pos = close + 2;
  }
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    const auto close = text.find("}}", pos + 2);
    if (close == std::string::npos) break;
    out.push_back(text.substr(pos + 2, close - pos - 2));
    pos = close + 2;
  }
  return out;
}

TemplateSet TemplateSet::defaults() {
  // Reconstructed prompts; the originals were never published.
  TemplateSet set;
  const auto en = Language::English;
  const auto zh = Language::Chinese;
  set.set({templates::kTripleExtraction, en, "You extract knowledge triples from text.",
           "Extract knowledge triples from the context below. Include every fact that is relevant to the "
           "question. Write one triple per line in the form\nhead ||| relation ||| tail\n"
           "Do not number the lines and do not add any other text.\n\n"
           "Question: {{question}}\nContext: {{context}}"});
  set.set({templates::kTripleExtraction, zh, "你负责从文本中抽取知识三元组。",
           "从下面的上下文中抽取与问题相关的所有知识三元组。每行输出一个三元组，格式为\n"
           "头实体 ||| 关系 ||| 尾实体\n不要编号，不要输出其他内容。\n\n"
           "问题：{{question}}\n上下文：{{context}}"});
  set.set({templates::kFalseAnswer, en, "You write plausible but incorrect answers for robustness tests.",
           "Given a question and its correct answer, write one short answer of the same type (name, number, "
           "location, time, ...) that sounds plausible but is wrong. Output only the answer.\n\n"
           "Question: {{question}}\nCorrect answer: {{answer}}{{avoid}}"});
  set.set({templates::kFalseAnswer, zh, "你负责为鲁棒性测试编写看似合理但错误的答案。",
           "给定问题及其正确答案，写出一个类型相同（人名、数字、地点、时间等）、看似合理但错误的简短答案。"
           "只输出答案。\n\n问题：{{question}}\n正确答案：{{answer}}{{avoid}}"});
  set.set({templates::kHeadEntities, en, "You identify entities in questions.",
           "List the head entities mentioned in the question, separated by semicolons. "
           "Output only the entities.\n\nQuestion: {{question}}"});
  set.set({templates::kHeadEntities, zh, "你负责识别问题中的实体。",
           "列出问题中提到的头实体，用分号分隔。只输出实体。\n\n问题：{{question}}"});
  set.set({templates::kJudge, en, "You grade answers to reading-comprehension questions.",
           "Compare the model answer with the reference label. Start your reply with exactly one tag:\n"
           "CORRECT - the answer matches the key points of the label, even if worded differently\n"
           "REJECTED - the model declines to answer, e.g. because the information is insufficient\n"
           "WRONG - anything else\n\n"
           "Question: {{question}}\nLabel: {{label}}\nModel answer: {{output}}"});
  set.set({templates::kJudge, zh, "你负责评判阅读理解问题的回答。",
           "将模型回答与参考答案比较。回复必须以下列标签之一开头：\n"
           "CORRECT - 回答与参考答案要点一致，即使表述不同\n"
           "REJECTED - 模型拒绝回答，例如认为信息不足\n"
           "WRONG - 其他情况\n\n"
           "问题：{{question}}\n参考答案：{{label}}\n模型回答：{{output}}"});
  return set;
}

void TemplateSet::set(PromptTemplate t) {
  auto key = std::make_pair(t.name, t.language);
  templates_[key] = std::move(t);
}

void TemplateSet::load_overrides(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!doc.contains("templates") || !doc["templates"].is_array()) {
    throw ConfigError(path.string() + ": expected a 'templates' array");
  }
  for (const auto& t : doc["templates"]) {
    PromptTemplate pt;
    pt.name = t.value("name", "");
    pt.language = parse_language(t.value("language", "en"));
    pt.system = t.value("system", "");
    pt.text = t.value("text", "");
    if (pt.name.empty() || pt.text.empty()) throw ConfigError(path.string() + ": template needs name and text");
    set(std::move(pt));
  }
}

const PromptTemplate& TemplateSet::get(const std::string& name, Language lang) const {
  auto it = templates_.find({name, lang});
  if (it == templates_.end()) it = templates_.find({name, Language::English});
  if (it == templates_.end()) throw ConfigError("no prompt template named '" + name + "'");
  return it->second;
}

std::vector<PromptTemplate> TemplateSet::all() const {
  std::vector<PromptTemplate> out;
  for (const auto& [key, t] : templates_) out.push_back(t);
  return out;
}

ChatRequest make_request(const TemplateSet& templates, const std::string& name, Language lang,
                         const std::map<std::string, std::string>& values) {
  const auto& t = templates.get(name, lang);
  return {name, t.system, t.render(values)};
}

// ---------------------------------------------------------------------------
// Operations

std::vector<triples::Triple> extract_triples(ClientContext& ctx, const std::string& question,
                                             const std::string& context, Language lang) {
  if (context.empty()) throw std::invalid_argument("extract_triples: empty context");
  const auto req = make_request(ctx.templates, templates::kTripleExtraction, lang,
                                {{"question", question}, {"context", context}});
  const ChatReply reply = with_retries(ctx.retry, [&] { return ctx.client.complete(req); });
  if (reply.kind == ChatReply::Kind::Refusal) {
    log::warn("triple extraction refused by provider");
    return {};
  }
  if (ctx.strict_triples) {
    std::vector<triples::Triple> out;
    try {
      out = triples::parse_triples(reply.text);
    } catch (const triples::MalformedTripleError& e) {
      throw TripleReplyError(e.line(), e.fragment());
    }
    for (const auto& t : out) {
      if (!triples::is_valid_triple(t)) throw TripleReplyError(0, triples::render_triple(t));
    }
    return out;
  }
  auto parsed = triples::parse_triples_lenient(reply.text);
  for (const auto& [line, frag] : parsed.rejected) {
    log::warn("triple reply line " + std::to_string(line) + " ignored: '" + frag + "'");
  }
  std::erase_if(parsed.triples, [](const triples::Triple& t) { return !triples::is_valid_triple(t); });
  return parsed.triples;
}

namespace {

std::string clean_candidate(std::string_view raw) {
  std::string s = trim_copy(raw);
  if (const auto nl = s.find('\n'); nl != std::string::npos) s = trim_copy(s.substr(0, nl));
  for (const char* prefix : {"Answer:", "answer:", "ANSWER:", "答案：", "答案:"}) {
    if (s.rfind(prefix, 0) == 0) s = trim_copy(s.substr(std::string_view(prefix).size()));
  }
  auto strip_pair = [&s](std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.rfind(open, 0) == 0 &&
        s.compare(s.size() - close.size(), close.size(), close) == 0) {
      s = trim_copy(s.substr(open.size(), s.size() - open.size() - close.size()));
    }
  };
  strip_pair("\"", "\"");
  strip_pair("\xE2\x80\x9C", "\xE2\x80\x9D");  // “ ”
  strip_pair("\xE3\x80\x8C", "\xE3\x80\x8D");  // 「 」
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s.size() >= 3 && s.compare(s.size() - 3, 3, "\xE3\x80\x82") == 0) s.resize(s.size() - 3);  // 。
  return trim_copy(s);
}

}  // namespace

std::string generate_false_answer(ClientContext& ctx, const std::string& question, const std::string& answer,
                                  Language lang) {
  if (text::normalize(answer, lang).empty()) throw std::invalid_argument("generate_false_answer: empty answer");
  const std::string gold = text::normalize(answer, lang);
  std::vector<std::string> rejected;
  const std::size_t attempts = std::max<std::size_t>(1, ctx.retry.max_attempts);
  auto delay = ctx.retry.backoff;
  for (std::size_t i = 1; i <= attempts; ++i) {
    std::string avoid;
    if (!rejected.empty()) {
      avoid = lang == Language::Chinese ? "\n不要回答：" : "\nDo not answer with: ";
      for (std::size_t k = 0; k < rejected.size(); ++k) avoid += (k ? "; " : "") + rejected[k];
    }
    const auto req = make_request(ctx.templates, templates::kFalseAnswer, lang,
                                  {{"question", question}, {"answer", answer}, {"avoid", avoid}});
    ChatReply reply;
    try {
      reply = ctx.client.complete(req);
    } catch (const TransportError&) {
      if (i == attempts) throw;
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * ctx.retry.multiplier));
      continue;
    }
    if (reply.kind == ChatReply::Kind::Refusal) continue;
    const std::string candidate = clean_candidate(reply.text);
    const std::string norm = text::normalize(candidate, lang);
    if (norm.empty() || norm == gold) {
      if (!candidate.empty()) rejected.push_back(candidate);
      continue;
    }
    return candidate;
  }
  throw ReplyError("false-answer generation exhausted " + std::to_string(attempts) +
                   " attempts without a candidate distinct from the gold answer");
}

std::vector<std::string> extract_head_entities(ClientContext& ctx, const std::string& question, Language lang) {
  if (question.empty()) throw std::invalid_argument("extract_head_entities: empty question");
  const auto req = make_request(ctx.templates, templates::kHeadEntities, lang, {{"question", question}});
  const ChatReply reply = with_retries(ctx.retry, [&] { return ctx.client.complete(req); });
  if (reply.kind == ChatReply::Kind::Refusal) return {};
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string normalized = reply.text;
  // Full-width semicolon (U+FF1B) counts as a separator too.
  for (std::size_t pos; (pos = normalized.find("\xEF\xBC\x9B")) != std::string::npos;) {
    normalized.replace(pos, 3, ";");
  }
  std::size_t start = 0;
  while (start <= normalized.size()) {
    std::size_t end = normalized.find_first_of(";\n", start);
    if (end == std::string::npos) end = normalized.size();
    std::string item = trim_copy(std::string_view(normalized).substr(start, end - start));
    if (item.size() >= 2 && (item[0] == '-' || item[0] == '*') && item[1] == ' ') item = trim_copy(item.substr(2));
    if (!item.empty() && seen.insert(item).second) out.push_back(item);
    start = end + 1;
  }
  return out;
}

Verdict parse_judge_reply(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size() && !std::isalpha(static_cast<unsigned char>(reply[i]))) {
    const char c = reply[i];
    if (!(std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '[' || c == '"' || c == '\'' ||
          c == '`' || c == '#' || c == '(' || c == '<')) {
      break;
    }
    ++i;
  }
  std::size_t j = i;
  while (j < reply.size() && std::isalpha(static_cast<unsigned char>(reply[j]))) ++j;
  std::string tag(reply.substr(i, j - i));
  std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::toupper(c); });
  if (tag == "WRONG") return Verdict::Wrong;
  if (tag == "CORRECT") return Verdict::Correct;
  if (tag == "REJECTED") return Verdict::Rejected;
  throw JudgeParseError("judge reply has no WRONG/CORRECT/REJECTED tag: '" + std::string(reply.substr(0, 80)) + "'");
}

Verdict judge(ClientContext& ctx, const std::string& question, const std::string& label,
              const std::string& model_output, Language lang) {
  if (question.empty() || label.empty() || model_output.empty()) {
    throw std::invalid_argument("judge: question, label and output must be non-empty");
  }
  const auto req = make_request(ctx.templates, templates::kJudge, lang,
                                {{"question", question}, {"label", label}, {"output", model_output}});
  const ChatReply reply = with_retries(ctx.retry, [&] { return ctx.client.complete(req); });
  if (reply.kind == ChatReply::Kind::Refusal) throw JudgeParseError("judge refused to grade");
  return parse_judge_reply(reply.text);
}

std::vector<SearchResult> web_search(SearchClient& client, const std::vector<std::string>& keywords, std::size_t cap,
                                     const RetryPolicy& retry) {
  if (keywords.empty()) throw std::invalid_argument("web_search: no keywords");
  std::string query;
  for (const auto& k : keywords) {
    if (!query.empty()) query += ' ';
    query += k;
  }
  return with_retries(retry, [&] { return client.search(query, cap); });
}

}  // namespace robustqa::clients
