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

// External-service boundary: chat-completion and web-search clients, their
// fixture-backed mocks, prompt templates, and the pipeline operations built on
// top of them (triple extraction, false answers, head entities, judging).

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "robustqa/common.hpp"
#include "robustqa/jsonl.hpp"
#include "robustqa/log.hpp"
#include "robustqa/triples.hpp"
#include "robustqa/verdict.hpp"

namespace robustqa::clients {

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff{500};
  double multiplier = 2.0;
};

/// Runs `call` until it succeeds, retrying TransportError with exponential
/// backoff. Never more than max_attempts calls.
template <class F>
auto with_retries(const RetryPolicy& policy, F&& call) -> decltype(call()) {
  const std::size_t attempts = std::max<std::size_t>(1, policy.max_attempts);
  auto delay = policy.backoff;
  for (std::size_t i = 1;; ++i) {
    try {
      return call();
    } catch (const TransportError& e) {
      if (i >= attempts) throw;
      log::debug(std::string("transport error, retrying: ") + e.what());
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
    }
  }
}

struct ChatRequest {
  std::string template_name;
  std::string system;
  std::string user;
};

struct ChatReply {
  enum class Kind { Text, Refusal };
  Kind kind = Kind::Text;
  std::string text;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  /// Returns text or a typed refusal; throws TransportError on failure.
  virtual ChatReply complete(const ChatRequest& request) = 0;
  virtual std::string model_name() const = 0;
};

struct HttpCompletionOptions {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_in_flight = 4;
  double temperature = 0.0;
};

/// JSON-over-HTTP chat completion (system + user message, single text reply).
class HttpCompletionClient final : public CompletionClient {
 public:
  explicit HttpCompletionClient(HttpCompletionOptions options);
  ChatReply complete(const ChatRequest& request) override;
  std::string model_name() const override { return options_.model; }

  /// Request body / reply parsing, exposed for tests.
  static json request_body(const HttpCompletionOptions& options, const ChatRequest& request);
  static ChatReply parse_reply(const std::string& body);

 private:
  HttpCompletionOptions options_;
  std::counting_semaphore<64> in_flight_;
};

/// Canned replies keyed by (template, sha256 of the user prompt). Entries
/// without a hash are the template's default. Fixture lines:
///   {"template": ..., "prompt_sha256": ..., "reply": ...}
/// plus optional "refusal": true or "error": "transport".
class MockCompletionClient final : public CompletionClient {
 public:
  struct Entry {
    std::string reply;
    bool refusal = false;
    bool transport_error = false;
  };

  MockCompletionClient() = default;
  static std::unique_ptr<MockCompletionClient> from_jsonl(const std::filesystem::path& path);
  static std::unique_ptr<MockCompletionClient> from_jsonl_text(std::string_view content, const std::string& origin = "fixture");

  void add(const std::string& template_name, std::optional<std::string> prompt_sha256, Entry entry);
  ChatReply complete(const ChatRequest& request) override;
  std::string model_name() const override { return "mock"; }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::pair<std::string, std::string>, Entry> by_hash_;
  std::map<std::string, Entry> defaults_;
  std::atomic<std::size_t> calls_{0};
};

/// Decorator that appends every prompt and raw reply to an audit JSONL file.
class TracingCompletionClient final : public CompletionClient {
 public:
  TracingCompletionClient(CompletionClient& inner, const std::filesystem::path& audit_path);
  ChatReply complete(const ChatRequest& request) override;
  std::string model_name() const override { return inner_.model_name(); }

 private:
  CompletionClient& inner_;
  std::ofstream out_;
  std::mutex mu_;
};

struct SearchResult {
  std::string title;
  std::string snippet;
  std::string url;

  bool operator==(const SearchResult&) const = default;
};

void to_json(json& j, const SearchResult& r);
void from_json(const json& j, SearchResult& r);

class SearchClient {
 public:
  virtual ~SearchClient() = default;
  /// Provider order, at most `cap` results, snippets non-empty.
  virtual std::vector<SearchResult> search(const std::string& query, std::size_t cap) = 0;
};

struct SerpApiOptions {
  std::string base_url = "https://serpapi.com";
  std::string engine = "google";
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

class SerpApiSearchClient final : public SearchClient {
 public:
  explicit SerpApiSearchClient(SerpApiOptions options) : options_(std::move(options)) {}
  std::vector<SearchResult> search(const std::string& query, std::size_t cap) override;
  static std::vector<SearchResult> parse_results(const std::string& body, std::size_t cap);

 private:
  SerpApiOptions options_;
};

/// Fixture lines: {"query": "k1 k2", "results": [{"title","snippet","url"}]};
/// query "*" is the fallback; optional "error": "transport".
class MockSearchClient final : public SearchClient {
 public:
  static std::unique_ptr<MockSearchClient> from_jsonl(const std::filesystem::path& path);
  static std::unique_ptr<MockSearchClient> from_jsonl_text(std::string_view content, const std::string& origin = "fixture");

  void add(const std::string& query, std::vector<SearchResult> results, bool transport_error = false);
  std::vector<SearchResult> search(const std::string& query, std::size_t cap) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  struct Entry {
    std::vector<SearchResult> results;
    bool transport_error = false;
  };
  std::map<std::string, Entry> entries_;
  std::atomic<std::size_t> calls_{0};
};

/// Template text with {{name}} placeholders.
struct PromptTemplate {
  std::string name;
  Language language = Language::English;
  std::string system;
  std::string text;

  /// Throws ConfigError naming the first placeholder missing from `values`.
  std::string render(const std::map<std::string, std::string>& values) const;
  std::vector<std::string> placeholders() const;
};

namespace templates {
inline constexpr const char* kTripleExtraction = "triple_extraction";
inline constexpr const char* kFalseAnswer = "false_answer";
inline constexpr const char* kHeadEntities = "head_entities";
inline constexpr const char* kJudge = "judge";
}  // namespace templates

class TemplateSet {
 public:
  /// The shipped reconstructions of the dataset-construction and judging prompts.
  static TemplateSet defaults();
  /// Overrides from {"templates": [{"name", "language", "system", "text"}]}.
  void load_overrides(const std::filesystem::path& path);
  void set(PromptTemplate t);
  const PromptTemplate& get(const std::string& name, Language lang) const;
  std::vector<PromptTemplate> all() const;

 private:
  std::map<std::pair<std::string, Language>, PromptTemplate> templates_;
};

/// Rendered request for a template; the user prompt is what mocks hash.
ChatRequest make_request(const TemplateSet& templates, const std::string& name, Language lang,
                         const std::map<std::string, std::string>& values);

class TripleReplyError : public ReplyError {
 public:
  TripleReplyError(std::size_t line, std::string fragment)
      : ReplyError("malformed triple in reply, line " + std::to_string(line) + ": '" + fragment + "'"),
        line_(line),
        fragment_(std::move(fragment)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& fragment() const noexcept { return fragment_; }

 private:
  std::size_t line_;
  std::string fragment_;
};

class JudgeParseError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

struct ClientContext {
  CompletionClient& client;
  const TemplateSet& templates;
  RetryPolicy retry;
  bool strict_triples = true;
};

std::vector<triples::Triple> extract_triples(ClientContext& ctx, const std::string& question,
                                             const std::string& context, Language lang);

/// A plausible wrong answer, distinct from `answer` under normalization.
/// Candidates equal to the gold answer are retried (each retry lists the
/// rejected candidates in the prompt) within retry.max_attempts calls.
std::string generate_false_answer(ClientContext& ctx, const std::string& question,
                                  const std::string& answer, Language lang);

/// Entities from a ';'-separated (or one-per-line) reply. Empty reply -> empty list.
std::vector<std::string> extract_head_entities(ClientContext& ctx, const std::string& question, Language lang);

/// Maps the reply's leading tag (WRONG / CORRECT / REJECTED) to a Verdict.
Verdict judge(ClientContext& ctx, const std::string& question, const std::string& label,
              const std::string& model_output, Language lang);
Verdict parse_judge_reply(std::string_view reply);

std::vector<SearchResult> web_search(SearchClient& client, const std::vector<std::string>& keywords,
                                     std::size_t cap, const RetryPolicy& retry);

}  // namespace robustqa::clients
