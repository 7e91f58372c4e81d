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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "robustqa/clients.hpp"

namespace robustqa::clients {

namespace {

std::chrono::seconds whole_seconds(std::chrono::milliseconds ms) {
  return std::max(std::chrono::seconds(1), std::chrono::duration_cast<std::chrono::seconds>(ms));
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpCompletionClient::HttpCompletionClient(HttpCompletionOptions options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.max_in_flight, 1, 64))) {}

json HttpCompletionClient::request_body(const HttpCompletionOptions& options, const ChatRequest& request) {
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  return json{{"model", options.model}, {"messages", messages}, {"temperature", options.temperature}};
}

ChatReply HttpCompletionClient::parse_reply(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ReplyError(std::string("completion reply is not JSON: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw ReplyError("completion reply has no choices");
  }
  const json& choice = doc["choices"][0];
  const json message = choice.value("message", json::object());
  if (message.contains("refusal") && message["refusal"].is_string()) {
    return {ChatReply::Kind::Refusal, message["refusal"].get<std::string>()};
  }
  if (choice.value("finish_reason", "") == "content_filter") return {ChatReply::Kind::Refusal, ""};
  if (!message.contains("content") || !message["content"].is_string()) {
    throw ReplyError("completion reply has no message content");
  }
  return {ChatReply::Kind::Text, message["content"].get<std::string>()};
}

ChatReply HttpCompletionClient::complete(const ChatRequest& request) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<64>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  httplib::Client cli(options_.base_url);
  cli.set_connection_timeout(whole_seconds(options_.timeout));
  cli.set_read_timeout(whole_seconds(options_.timeout));
  cli.set_write_timeout(whole_seconds(options_.timeout));
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  const auto res = cli.Post(options_.path, headers, request_body(options_, request).dump(), "application/json");
  if (!res) throw TransportError("completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    const std::string msg = "completion endpoint returned HTTP " + std::to_string(res->status);
    if (retryable(res->status)) throw TransportError(msg);
    throw ReplyError(msg + ": " + res->body.substr(0, 200));
  }
  return parse_reply(res->body);
}

std::vector<SearchResult> SerpApiSearchClient::parse_results(const std::string& body, std::size_t cap) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ReplyError(std::string("search reply is not JSON: ") + e.what());
  }
  std::vector<SearchResult> out;
  for (const auto& r : doc.value("organic_results", json::array())) {
    if (out.size() == cap) break;
    SearchResult sr{r.value("title", ""), r.value("snippet", ""), r.value("link", "")};
    if (!sr.snippet.empty()) out.push_back(std::move(sr));
  }
  return out;
}

std::vector<SearchResult> SerpApiSearchClient::search(const std::string& query, std::size_t cap) {
  httplib::Client cli(options_.base_url);
  cli.set_connection_timeout(whole_seconds(options_.timeout));
  cli.set_read_timeout(whole_seconds(options_.timeout));
  httplib::Params params{{"engine", options_.engine},
                         {"q", query},
                         {"api_key", options_.api_key},
                         {"num", std::to_string(cap)}};
  const auto res = cli.Get("/search.json", params, httplib::Headers{});
  if (!res) throw TransportError("search request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    const std::string msg = "search endpoint returned HTTP " + std::to_string(res->status);
    if (retryable(res->status)) throw TransportError(msg);
    throw ReplyError(msg);
  }
  return parse_results(res->body, cap);
}

}  // namespace robustqa::clients
