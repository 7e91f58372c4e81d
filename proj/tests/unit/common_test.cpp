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

#include <set>

#include "robustqa/common.hpp"

namespace robustqa {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1);
  Rng b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, Uniform01IsHalfOpen) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, BernoulliEdges) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(rng.bernoulli(0.0));
    EXPECT_TRUE(rng.bernoulli(1.0));
  }
}

TEST(Seeds, DeriveSeedDependsOnKey) {
  EXPECT_EQ(derive_seed(7, "a"), derive_seed(7, "a"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(7, "b"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(8, "a"));
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Language, ParseAndPrint) {
  EXPECT_EQ(parse_language("en"), Language::English);
  EXPECT_EQ(parse_language("Chinese"), Language::Chinese);
  EXPECT_EQ(to_string(Language::Chinese), "zh");
  EXPECT_THROW(parse_language("fr"), DataError);
}

TEST(Errors, KindsMapToExitCodes) {
  EXPECT_EQ(static_cast<int>(UsageError("x").kind()), 1);
  EXPECT_EQ(static_cast<int>(ConfigError("x").kind()), 2);
  EXPECT_EQ(static_cast<int>(DataError("x").kind()), 3);
  EXPECT_EQ(static_cast<int>(TransportError("x").kind()), 4);
  EXPECT_EQ(static_cast<int>(ReplyError("x").kind()), 4);
}

}  // namespace
}  // namespace robustqa
