// tests/unit/eval_test.cpp

// Copyright 2026  The slmforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "slmforge/common/rng.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/eval/metrics.hpp"
#include "slmforge/eval/report.hpp"

namespace slmforge::eval {
namespace {

std::string RandomText(Rng& rng, std::size_t max_len, int alphabet, bool words) {
  const std::size_t n = rng.Below(max_len + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (words && i > 0) out += ' ';
    out += static_cast<char>('a' + rng.Below(alphabet));
  }
  return out;
}

std::u32string ToU32(const std::vector<char32_t>& v) { return std::u32string(v.begin(), v.end()); }

TEST(Wer, Examples) {
  EXPECT_DOUBLE_EQ(Wer({"a b c"}, {"a b c"}), 0.0);
  EXPECT_NEAR(Wer({"a b c"}, {"a x c"}), 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(Wer({"a"}, {""}), 1.0);
  EXPECT_THROW(Wer({""}, {"a"}), MetricError);
  EXPECT_THROW(Wer({"a"}, {"a", "b"}), MetricError);
}

TEST(Wer, CorpusLevelNotAveraged) {
  // 1 error over 1 word plus 0 over 3 words.
  EXPECT_NEAR(Wer({"a", "b c d"}, {"x", "b c d"}), 0.25, 1e-12);
}

TEST(Cer, Examples) {
  EXPECT_DOUBLE_EQ(Cer({"abc"}, {"abc"}), 0.0);
  EXPECT_NEAR(Cer({"abc"}, {"abd"}), 1.0 / 3.0, 1e-12);
  const std::u32string ab = U"ab", ba = U"ba";
  const double oracle = static_cast<double>(testing::RecursiveEditDistance(ab, ba)) / 2.0;
  EXPECT_DOUBLE_EQ(oracle, 1.0);
  EXPECT_DOUBLE_EQ(Cer({"ab"}, {"ba"}), oracle);
  // Whitespace counts as one character after collapsing.
  EXPECT_NEAR(Cer({"a  b"}, {"ab"}), 1.0 / 3.0, 1e-12);
}

TEST(EditDistance, MatchesRecursiveOracleOnWords) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int alphabet = 1 + static_cast<int>(rng.Below(4));
    const auto a = WordTokens(RandomText(rng, 8, alphabet, true));
    const auto b = WordTokens(RandomText(rng, 8, alphabet, true));
    ASSERT_EQ(EditDistance(a, b), testing::RecursiveEditDistance(a, b)) << trial;
  }
}

TEST(EditDistance, MatchesRecursiveOracleOnChars) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const int alphabet = 1 + static_cast<int>(rng.Below(4));
    const auto a = CharTokens(RandomText(rng, 8, alphabet, false));
    const auto b = CharTokens(RandomText(rng, 8, alphabet, false));
    ASSERT_EQ(EditDistance(a, b), testing::RecursiveEditDistance(ToU32(a), ToU32(b))) << trial;
  }
}

TEST(Wer, ZeroIffEqualAndSwapSymmetry) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::string a = RandomText(rng, 8, 3, true), b = RandomText(rng, 8, 3, true);
    if (a.empty()) a = "a";
    if (b.empty()) b = "b";
    const double ab = Wer({a}, {b}), ba = Wer({b}, {a});
    EXPECT_EQ(ab == 0.0, WordTokens(a) == WordTokens(b));
    EXPECT_NEAR(ab * WordTokens(a).size(), ba * WordTokens(b).size(), 1e-9);
    const double cab = Cer({a}, {b}), cba = Cer({b}, {a});
    EXPECT_EQ(cab == 0.0, CharTokens(a) == CharTokens(b));
    EXPECT_NEAR(cab * CharTokens(a).size(), cba * CharTokens(b).size(), 1e-9);
  }
}

TEST(Chrf, Examples) {
  EXPECT_DOUBLE_EQ(Chrf({"waaw dëgg"}, {"waaw dëgg"}), 100.0);
  EXPECT_DOUBLE_EQ(Chrf({"abc"}, {"xyz"}), 0.0);
  EXPECT_DOUBLE_EQ(Chrf({"abc"}, {""}), 0.0);
  EXPECT_NEAR(Chrf({"abcd"}, {"abce"}), testing::BruteChrf({"abcd"}, {"abce"}), 1e-6);
}

TEST(Chrf, MatchesBruteForceOnRandomCorpora) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> refs, hyps;
    const std::size_t n = 1 + rng.Below(4);
    for (std::size_t i = 0; i < n; ++i) {
      refs.push_back(RandomText(rng, 9, 4, rng.Below(2) == 1));
      hyps.push_back(RandomText(rng, 9, 4, rng.Below(2) == 1));
    }
    const double got = Chrf(refs, hyps);
    ASSERT_NEAR(got, testing::BruteChrf(refs, hyps), 1e-6) << trial;
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 100.0);
  }
}

TEST(Chrf, PermutationInvariant) {
  Rng rng(9);
  std::vector<std::string> refs, hyps;
  for (int i = 0; i < 12; ++i) {
    refs.push_back(RandomText(rng, 10, 5, true));
    hyps.push_back(RandomText(rng, 10, 5, true));
  }
  const double base = Chrf(refs, hyps);
  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int round = 0; round < 10; ++round) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    std::vector<std::string> r, h;
    for (auto i : order) {
      r.push_back(refs[i]);
      h.push_back(hyps[i]);
    }
    EXPECT_DOUBLE_EQ(Chrf(r, h), base);
  }
}

TEST(Metrics, LeadingTrailingWhitespaceInvariant) {
  const std::vector<std::string> refs = {"a bc d", "dëgg la"}, hyps = {"a bd d", "dëg la"};
  const std::vector<std::string> prefs = {"  a bc d\t", "\ndëgg la "}, phyps = {" a bd d", "dëg la  "};
  EXPECT_DOUBLE_EQ(Wer(refs, hyps), Wer(prefs, phyps));
  EXPECT_DOUBLE_EQ(Cer(refs, hyps), Cer(prefs, phyps));
  EXPECT_DOUBLE_EQ(Chrf(refs, hyps), Chrf(prefs, phyps));
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Report LoadFixture(const std::string& name) {
  return ReportFromJson(nlohmann::json::parse(ReadFile(std::string(SLMFORGE_FIXTURE_DIR) + "/" + name)));
}

class FixtureRender : public ::testing::TestWithParam<std::string> {};

TEST_P(FixtureRender, MatchesGoldenText) {
  const auto report = LoadFixture(GetParam() + ".json");
  const auto golden = ReadFile(std::string(SLMFORGE_FIXTURE_DIR) + "/" + GetParam() + ".txt");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(RenderText(report), golden);
}

TEST_P(FixtureRender, JsonRoundTrip) {
  const auto report = LoadFixture(GetParam() + ".json");
  const auto again = ReportFromJson(nlohmann::json::parse(RenderJson(report)));
  EXPECT_EQ(RenderText(again), RenderText(report));
  EXPECT_EQ(RenderJson(again), RenderJson(report));
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureRender, ::testing::Values("pretraining_wer", "cot_asr", "cot_translation"));

TEST(Report, FixtureRowValues) {
  const auto wer = RenderText(LoadFixture("pretraining_wer.json"));
  EXPECT_NE(wer.find("WER (↓)"), std::string::npos);
  const auto ours = wer.find("Ours");
  ASSERT_NE(ours, std::string::npos);
  EXPECT_NE(wer.substr(ours, wer.find('\n', ours) - ours).find("35.65"), std::string::npos);

  const auto asr = RenderText(LoadFixture("cot_asr.json"));
  const auto line_start = asr.find("\ntranscribe ");
  ASSERT_NE(line_start, std::string::npos);
  const auto line = asr.substr(line_start + 1, asr.find('\n', line_start + 1) - line_start - 1);
  EXPECT_NE(line.find("29.09"), std::string::npos);
  EXPECT_NE(line.find("15.26"), std::string::npos);
  EXPECT_LT(line.find("29.09"), line.find("15.26"));

  const auto mt = RenderText(LoadFixture("cot_translation.json"));
  EXPECT_NE(mt.find("ChRF (↑)"), std::string::npos);
  EXPECT_NE(mt.find("33.79"), std::string::npos);
}

TEST(Report, EmptyRowsGiveHeaderOnly) {
  Report r;
  r.name_title = "Model";
  r.columns = {{"wer", "WER", Direction::kLower, 2}};
  const auto text = RenderText(r);
  EXPECT_NE(text.find("Model"), std::string::npos);
  EXPECT_NE(text.find("WER (↓)"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(Report, MissingCellAndPrecision) {
  Report r;
  r.columns = {{"a", "A", Direction::kNone, 1}, {"b", "B", Direction::kHigher, 3}};
  r.rows = {{"x", {{"a", 1.25}}}};
  const auto text = RenderText(r);
  EXPECT_NE(text.find("1.2"), std::string::npos);
  EXPECT_EQ(text.find("1.25"), std::string::npos);
  EXPECT_NE(text.find(" -"), std::string::npos);
  EXPECT_EQ(ColumnHeader(r.columns[0]), "A");
  EXPECT_EQ(ColumnHeader(r.columns[1]), "B (↑)");
}

TEST(Report, BuildMetricReportUsesPercentages) {
  SystemScores s;
  s.name = "sys";
  s.utterances = 2;
  s.ref_words = 4;
  s.metrics = {{"wer", 0.25}, {"cer", 0.125}, {"chrf", 55.5}};
  const auto report = BuildMetricReport("t", {s}, {"wer", "cer", "chrf"});
  // Metric columns, then utterance and reference word counts.
  ASSERT_EQ(report.columns.size(), 5u);
  EXPECT_EQ(report.columns[3].key, "utterances");
  EXPECT_EQ(report.columns[0].direction, Direction::kLower);
  EXPECT_EQ(report.columns[2].direction, Direction::kHigher);
  const auto text = RenderText(report);
  EXPECT_NE(text.find("25.00"), std::string::npos);
  EXPECT_NE(text.find("12.50"), std::string::npos);
  EXPECT_NE(text.find("55.50"), std::string::npos);
  EXPECT_EQ(std::get<double>(report.rows[0].cells.at("ref_words")), 4.0);
}

}  // namespace
}  // namespace slmforge::eval
