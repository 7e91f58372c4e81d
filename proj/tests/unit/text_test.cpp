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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "robustqa/text.hpp"

namespace robustqa::text {
namespace {

using Strings = std::vector<std::string>;

std::string random_ascii(Rng& rng, std::size_t len, std::string_view alphabet) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
  return s;
}

TEST(Tokenize, EnglishStripsPunctuationAndCase) {
  EXPECT_EQ(tokenize("Magdalen Tower,", Language::English).tokens, (Strings{"magdalen", "tower"}));
  EXPECT_EQ(tokenize("  \"Oxford's\"  (tower)!", Language::English).tokens, (Strings{"oxford's", "tower"}));
  EXPECT_TRUE(tokenize("", Language::English).empty());
  EXPECT_TRUE(tokenize(" ... , ", Language::English).empty());
}

TEST(Tokenize, ChineseIsCharacterLevel) {
  EXPECT_EQ(tokenize("北京大学abc", Language::Chinese).tokens, (Strings{"北", "京", "大", "学", "abc"}));
  EXPECT_EQ(tokenize("清华，2024年", Language::Chinese).tokens, (Strings{"清", "华", "2024", "年"}));
}

// Independent ASCII oracle: whitespace split, strip punctuation at both ends, lowercase.
Strings ascii_tokens(const std::string& s) {
  Strings out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0;
    std::size_t e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) {
      std::string t = cur.substr(b, e - b);
      for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(t);
    }
    cur.clear();
  };
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

TEST(Tokenize, MatchesCharacterClassOracleOnAscii) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_ascii(rng, rng.below(40), "abcXYZ019 ,.;:!?'\"()-\t");
    ASSERT_EQ(tokenize(s, Language::English).tokens, ascii_tokens(s)) << "input: '" << s << "'";
  }
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto s = random_ascii(rng, rng.below(40), "abcXYZ019 ,.;:!?'\"()-");
    const auto once = tokenize(s, Language::English).tokens;
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    EXPECT_EQ(tokenize(joined, Language::English).tokens, once);
  }
}

TEST(Tokenize, NoEmptyTokens) {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto s = random_ascii(rng, rng.below(40), "ab ,.;:!?");
    for (const auto& t : tokenize(s, Language::English).tokens) EXPECT_FALSE(t.empty());
    for (const auto& t : tokenize(s, Language::Chinese).tokens) EXPECT_FALSE(t.empty());
  }
}

TEST(SegmentSpans, DelimiterRule) {
  const auto seg = segment_spans("A b, c d. e");
  ASSERT_EQ(seg.spans.size(), 3u);
  EXPECT_EQ(seg.span(0), "A b");
  EXPECT_EQ(seg.span(1), " c d");
  EXPECT_EQ(seg.span(2), " e");
  EXPECT_EQ(seg.reassemble(), "A b, c d. e");
}

TEST(SegmentSpans, NoPunctuationIsOneSpan) {
  const auto seg = segment_spans("just some words");
  ASSERT_EQ(seg.spans.size(), 1u);
  EXPECT_EQ(seg.span(0), "just some words");
}

TEST(SegmentSpans, ChineseDelimiters) {
  const auto seg = segment_spans("北京，上海。广州");
  ASSERT_EQ(seg.spans.size(), 3u);
  EXPECT_EQ(seg.span(0), "北京");
  EXPECT_EQ(seg.span(2), "广州");
}

TEST(SegmentSpans, ReassemblyIsIdentity) {
  Rng rng(21);
  const std::vector<std::string> pieces = {"a", "B", " ", ",", ".", ";", ":", "!", "?", "，", "。", "；",
                                           "：", "！", "？", "北", "x y", "\n", "..", "é"};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto n = rng.below(30);
    for (std::uint64_t k = 0; k < n; ++k) s += pieces[rng.below(pieces.size())];
    const auto seg = segment_spans(s);
    ASSERT_EQ(seg.reassemble(), s);
    for (std::size_t k = 0; k < seg.spans.size(); ++k) {
      ASSERT_GT(seg.spans[k].size(), 0u);
      if (k) {
        ASSERT_LE(seg.spans[k - 1].end, seg.spans[k].begin);
      }
    }
  }
}

TEST(SplitSentences, PartitionsTheText) {
  Rng rng(22);
  const std::vector<std::string> pieces = {"word", " ", ". ", "!", "? ", "。", "（", "）", "3.5", "\"", ")"};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto n = rng.below(20);
    for (std::uint64_t k = 0; k < n; ++k) s += pieces[rng.below(pieces.size())];
    const auto ranges = split_sentences(s);
    std::size_t pos = 0;
    for (const auto& r : ranges) {
      ASSERT_EQ(r.begin, pos);
      ASSERT_GT(r.end, r.begin);
      pos = r.end;
    }
    ASSERT_EQ(pos, s.size());
  }
}

TEST(SplitSentences, DecimalPointDoesNotSplit) {
  const std::string s = "It cost 3.5 pounds. Then it rose.";
  const auto r = split_sentences(s);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(s.substr(r[0].begin, r[0].size()), "It cost 3.5 pounds.");
}

TEST(ContainsAnswer, Examples) {
  EXPECT_TRUE(contains_answer("Mitchell Tower, for example, is modeled after Oxford's Magdalen Tower, and",
                              "Magdalen Tower", Language::English));
  EXPECT_TRUE(contains_answer("magdalen\xE2\x80\x94tower", "Magdalen Tower", Language::English));
  EXPECT_TRUE(contains_answer("MAGDALEN   TOWER", "magdalen tower", Language::English));
  EXPECT_FALSE(contains_answer("Radcliffe Camera", "Magdalen Tower", Language::English));
  EXPECT_THROW(contains_answer("x", "", Language::English), std::invalid_argument);
  EXPECT_THROW(contains_answer("x", " ,. ", Language::English), std::invalid_argument);
  EXPECT_TRUE(contains_answer("他毕业于北京大学。", "北京大学", Language::Chinese));
  EXPECT_FALSE(contains_answer("北京 大学", "北京大学", Language::Chinese));
}

// Independent ASCII oracle: lowercase, punctuation to space, collapse, trim.
std::string ascii_normalize(const std::string& s) {
  std::string tmp;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    tmp += (std::ispunct(u) || std::isspace(u)) ? ' ' : static_cast<char>(std::tolower(u));
  }
  std::string out;
  for (char c : tmp) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

TEST(ContainsAnswer, MatchesNormalizeThenFindOracle) {
  Rng rng(31);
  const std::string alphabet = "abAB .,-'";
  for (int i = 0; i < 3000; ++i) {
    const auto text = random_ascii(rng, rng.below(25), alphabet);
    auto answer = random_ascii(rng, 1 + rng.below(5), alphabet);
    const auto na = ascii_normalize(answer);
    if (na.empty()) {
      EXPECT_THROW(contains_answer(text, answer, Language::English), std::invalid_argument);
      continue;
    }
    const bool oracle = ascii_normalize(text).find(na) != std::string::npos;
    ASSERT_EQ(contains_answer(text, answer, Language::English), oracle) << "'" << text << "' / '" << answer << "'";
  }
}

TEST(ContainsAnswer, MonotoneUnderSuffix) {
  Rng rng(32);
  for (int i = 0; i < 1000; ++i) {
    const auto text = random_ascii(rng, rng.below(20), "ab .,");
    const auto suffix = random_ascii(rng, rng.below(10), "ab .,");
    const auto answer = random_ascii(rng, 1 + rng.below(3), "ab");
    if (contains_answer(text, answer, Language::English)) {
      EXPECT_TRUE(contains_answer(text + suffix, answer, Language::English));
    }
  }
}

TEST(FindOccurrences, WholeWordSkipsPartialMatches) {
  const std::string field = "Towers by Tower and tower.";
  const auto all = find_occurrences(field, "tower", Language::English, false);
  const auto whole = find_occurrences(field, "tower", Language::English, true);
  EXPECT_EQ(all.size(), 3u);
  ASSERT_EQ(whole.size(), 2u);
  EXPECT_EQ(field.substr(whole[0].begin, whole[0].size()), "Tower");
  EXPECT_EQ(field.substr(whole[1].begin, whole[1].size()), "tower");
}

TEST(FindOccurrences, MapsBackAcrossPunctuation) {
  const std::string field = "Oxford's Magdalen--Tower!";
  const auto occ = find_occurrences(field, "magdalen tower", Language::English, true);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(field.substr(occ[0].begin, occ[0].size()), "Magdalen--Tower");
}

TEST(TfIdf, UnseenTokenRanksFirst) {
  const auto model = TfIdfModel::fit({"common words here", "common again", "common"}, Language::English);
  const auto kw = tfidf_keywords(model, "common rare", 1);
  ASSERT_EQ(kw.size(), 1u);
  EXPECT_EQ(kw[0], "rare");
}

TEST(TfIdf, KLargerThanDistinctTokensReturnsAll) {
  const auto model = TfIdfModel::fit({"a b", "b c"}, Language::English);
  const auto kw = tfidf_keywords(model, "a b a", 10);
  EXPECT_EQ(std::set<std::string>(kw.begin(), kw.end()), (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(kw.size(), 2u);
}

TEST(TfIdf, Errors) {
  const auto model = TfIdfModel::fit({"a b"}, Language::English);
  EXPECT_THROW(tfidf_keywords(model, "?!", 3), std::invalid_argument);
  EXPECT_THROW(tfidf_keywords(model, "a", 0), std::invalid_argument);
  EXPECT_THROW(TfIdfModel::fit({}, Language::English), std::invalid_argument);
}

TEST(TfIdf, DocumentFrequencyBounds) {
  const std::vector<std::string> docs = {"x y z", "x x", "y", "w"};
  const auto model = TfIdfModel::fit(docs, Language::English);
  for (const auto& [tok, df] : model.document_frequencies()) {
    EXPECT_GE(df, 1u);
    EXPECT_LE(df, model.document_count());
  }
  EXPECT_EQ(model.document_frequency("x"), 2u);
  EXPECT_EQ(model.document_frequency("nope"), 0u);
}

TEST(TfIdf, MatchesBruteForceScoreTable) {
  const std::vector<std::string> docs = {"the tower stands in oxford", "the bridge crosses the river",
                                         "a tower and a bridge", "oxford colleges and chicago",
                                         "the quadrangles of chicago"};
  const auto model = TfIdfModel::fit(docs, Language::English);
  const std::string question = "which tower in oxford is the model for the chicago tower";
  // Hand-rolled: df by set membership, idf = ln((1+N)/(1+df)) + 1, tf = raw count.
  std::vector<std::set<std::string>> doc_sets;
  for (const auto& d : docs) {
    std::set<std::string> s;
    std::string w;
    for (char c : d + " ") {
      if (c == ' ') {
        if (!w.empty()) s.insert(w);
        w.clear();
      } else {
        w += c;
      }
    }
    doc_sets.push_back(s);
  }
  std::vector<std::string> q;
  {
    std::string w;
    for (char c : question + " ") {
      if (c == ' ') {
        if (!w.empty()) q.push_back(w);
        w.clear();
      } else {
        w += c;
      }
    }
  }
  std::vector<std::pair<std::string, double>> table;
  for (const auto& t : q) {
    if (std::any_of(table.begin(), table.end(), [&](const auto& e) { return e.first == t; })) continue;
    const double tf = static_cast<double>(std::count(q.begin(), q.end(), t));
    double df = 0;
    for (const auto& s : doc_sets) df += s.count(t);
    table.push_back({t, tf * (std::log((1.0 + 5.0) / (1.0 + df)) + 1.0)});
  }
  std::stable_sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  const auto got = tfidf_scored_keywords(model, question, table.size());
  ASSERT_EQ(got.size(), table.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].token, table[i].first) << "rank " << i;
    EXPECT_NEAR(got[i].score, table[i].second, 1e-12);
  }
}

TEST(TfIdf, KeywordsAreQuestionTokensAndDeterministic) {
  const auto model = TfIdfModel::fit({"alpha beta", "beta gamma", "delta"}, Language::English);
  const std::string question = "Is beta, or gamma, the epsilon of alpha?";
  const auto a = tfidf_keywords(model, question, 3);
  const auto b = tfidf_keywords(model, question, 3);
  EXPECT_EQ(a, b);
  const auto toks = tokenize(question, Language::English).tokens;
  for (const auto& k : a) EXPECT_NE(std::find(toks.begin(), toks.end(), k), toks.end());
}

}  // namespace
}  // namespace robustqa::text
