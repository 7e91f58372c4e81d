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
#include <stdexcept>
#include <string>
#include <string_view>

namespace robustqa {

enum class Language { English, Chinese };

std::string_view to_string(Language lang);
Language parse_language(std::string_view s);

// Error categories double as CLI exit codes.
enum class ErrorKind : int {
  Usage = 1,
  Config = 2,
  Data = 3,
  Client = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Anything that went wrong on the far side of an external service boundary.
class ClientError : public Error {
 public:
  explicit ClientError(const std::string& what) : Error(ErrorKind::Client, what) {}
};

// The service could not be reached or answered with a transport-level failure.
class TransportError : public ClientError {
 public:
  using ClientError::ClientError;
};

// The service answered, but the reply is unusable.
class ReplyError : public ClientError {
 public:
  using ClientError::ClientError;
};

/// Deterministic pseudo-random source. Draws are bit-stable across platforms
/// and standard-library implementations (no std::*_distribution involved).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

/// Per-item stream seed derived from a global seed and a stable item key.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

std::string sha256_hex(std::string_view bytes);

}  // namespace robustqa
