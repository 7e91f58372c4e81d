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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustqa/common.hpp"

namespace robustqa {

using json = nlohmann::json;

/// One compact JSON document per line, UTF-8, keys in sorted order.
template <class T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += json(item).dump();
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

template <class T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items) {
  write_text_file(path, to_jsonl(items));
}

/// Parses JSONL text. Blank lines are skipped; a malformed line raises a
/// DataError naming its 1-based line number.
template <class T>
std::vector<T> parse_jsonl(std::string_view content, const std::string& origin) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(json::parse(line).template get<T>());
    } catch (const std::exception& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    }
  }
  return out;
}

template <class T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl<T>(read_text_file(path), path.string());
}

/// Throws DataError when a required key is missing or has the wrong type.
template <class T>
T require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace robustqa
