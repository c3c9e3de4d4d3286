// tests/unit/curate_test.cpp

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

#include <cmath>
#include <limits>
#include <set>

#include "slmforge/audio/wav.hpp"
#include "slmforge/common/rng.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/curate/diarize.hpp"
#include "slmforge/curate/pipeline.hpp"
#include "slmforge/curate/quality.hpp"
#include "slmforge/curate/separation.hpp"
#include "slmforge/curate/vad.hpp"
#include "synth.hpp"
#include "toy.hpp"

namespace slmforge::curate {
namespace {

using testing::Concat;
using testing::Silence;
using testing::SpeechLike;

TEST(Vad, FindsBurstRegions) {
  const auto buf = Concat({Silence(1.0), SpeechLike(2.0, 150, 1), Silence(1.5), SpeechLike(1.0, 150, 2),
                           Silence(1.0)});
  const auto spans = VadSegments(buf, {});
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_NEAR(spans[0].start_s, 1.0, 0.05);
  EXPECT_NEAR(spans[0].end_s, 3.0, 0.05);
  EXPECT_NEAR(spans[1].start_s, 4.5, 0.05);
  for (const auto& s : spans) EXPECT_LT(s.start_s, s.end_s);
}

TEST(Vad, DropsShortBlips) {
  const auto buf = Concat({Silence(1.0), testing::Tone(300, 0.1), Silence(1.0)});
  EXPECT_TRUE(VadSegments(buf, {}).empty());
}

TEST(Vad, ShiftByHopsShiftsSpans) {
  const VadConfig cfg;
  const double hop_s = cfg.hop_ms / 1000.0;
  const auto speech = SpeechLike(2.0, 150, 3);
  const auto base = VadSegments(Concat({Silence(1.0), speech, Silence(1.0)}), cfg);
  ASSERT_FALSE(base.empty());
  for (int k : {1, 3, 7}) {
    const auto moved =
        VadSegments(Concat({Silence(1.0 + k * hop_s), speech, Silence(1.0 - k * hop_s)}), cfg);
    ASSERT_EQ(moved.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(moved[i].start_s - base[i].start_s, k * hop_s, 1e-9);
      EXPECT_NEAR(moved[i].end_s - base[i].end_s, k * hop_s, 1e-9);
    }
  }
}

// Clusters as explicit member sets; linkage is the mean pairwise distance.
std::vector<int> NaiveAverageLinkage(const std::vector<std::vector<double>>& pts, double threshold) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < pts.size(); ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double total = 0;
        for (auto a : clusters[i])
          for (auto b : clusters[j]) total += CosineDistance(pts[a], pts[b]);
        const double d = total / (clusters[i].size() * clusters[j].size());
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (best > threshold) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + bj);
  }
  std::vector<int> owner(pts.size());
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto i : clusters[c]) owner[i] = static_cast<int>(c);
  // Renumber by first appearance.
  std::vector<int> remap(clusters.size(), -1), out(pts.size());
  int next = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (remap[owner[i]] < 0) remap[owner[i]] = next++;
    out[i] = remap[owner[i]];
  }
  return out;
}

TEST(Diarize, ClusteringMatchesNaiveAverageLinkage) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> pts(3 + rng.Below(8), std::vector<double>(3));
    for (auto& p : pts)
      for (auto& x : p) x = rng.Uniform(-1, 1);
    const double threshold = rng.Uniform(0.1, 1.2);
    EXPECT_EQ(AgglomerativeCluster(pts, threshold), NaiveAverageLinkage(pts, threshold));
  }
}

TEST(Diarize, CosineDistanceEdgeCases) {
  EXPECT_DOUBLE_EQ(CosineDistance({1, 0}, {2, 0}), 0.0);
  EXPECT_DOUBLE_EQ(CosineDistance({1, 0}, {-1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(CosineDistance({0, 0}, {1, 0}), 1.0);
}

TEST(Diarize, SeparatesTwoVoices) {
  const auto buf = Concat({SpeechLike(3.0, 120, 1), SpeechLike(3.0, 700, 2)});
  const auto out = Diarize(buf, {Span{0.0, 6.0, std::nullopt}}, {});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(*out[0].speaker, "S0");
  EXPECT_EQ(*out[1].speaker, "S1");
  EXPECT_DOUBLE_EQ(out[0].end_s, out[1].start_s);
  const auto same = Diarize(SpeechLike(6.0, 120, 3), {Span{0.0, 6.0, std::nullopt}}, {});
  ASSERT_EQ(same.size(), 1u);
  EXPECT_EQ(*same[0].speaker, "S0");
}

TEST(Diarize, TwoTonesSplitOneSpan) {
  const auto buf = Concat({testing::Tone(200, 3.0), testing::Tone(3000, 3.0)});
  const std::vector<Span> span{Span{0.0, 6.0, std::nullopt}};
  const auto out = Diarize(buf, span, {});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0].end_s, 3.0, 1e-9);
  EXPECT_NE(*out[0].speaker, *out[1].speaker);
  DiarizeConfig all;
  all.cluster_distance_threshold = 2.0;
  const auto merged = Diarize(buf, span, all);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(*merged[0].speaker, "S0");
}

TEST(Quality, SnrMapping) {
  EXPECT_DOUBLE_EQ(SnrToScore(15.0), 3.0);
  EXPECT_NEAR(SnrToScore(100.0), 5.0, 1e-6);
  EXPECT_NEAR(SnrToScore(-100.0), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(EstimateSnrDb(Silence(1.0), {}), 0.0);
}

TEST(Quality, CleanBeatsNoisy) {
  const auto clean = Concat({Silence(0.5), SpeechLike(3.0, 150, 1), Silence(0.5)});
  const auto noisy = testing::Mix(clean, testing::Noise(4.0, 0.12, 2));
  EXPECT_GT(SnrProxyScore(clean, {}), 3.2);
  EXPECT_LT(SnrProxyScore(noisy, {}), 3.2);
}

TEST(Quality, ExternalScorer) {
  const auto buf = SpeechLike(1.0, 150, 1);
  EXPECT_DOUBLE_EQ(ExternalScore(buf, "cat >/dev/null; echo 4.25"), 4.25);
  EXPECT_DOUBLE_EQ(ExternalScore(buf, "cat >/dev/null; echo 9"), 5.0);
  EXPECT_THROW(ExternalScore(buf, "cat >/dev/null; echo nan-ish"), StageError);
  EXPECT_THROW(ExternalScore(buf, "cat >/dev/null; exit 4"), StageError);
}

SegmentRecord Rec(double dur, double q) {
  SegmentRecord r;
  r.duration_s = dur;
  r.quality_score = q;
  return r;
}

TEST(Filter, BoundarySemantics) {
  const PipelineConfig cfg;
  const auto f = FilterSegments({Rec(3.0, 3.3), Rec(30.0, 5.0), Rec(2.999, 5.0), Rec(30.001, 5.0),
                                 Rec(10.0, 3.2), Rec(1.0, 1.0)},
                                cfg);
  ASSERT_EQ(f.kept.size(), 2u);
  ASSERT_EQ(f.rejected.size(), 4u);
  EXPECT_EQ(f.rejected[0].second, RejectReason::kTooShort);
  EXPECT_EQ(f.rejected[1].second, RejectReason::kTooLong);
  EXPECT_EQ(f.rejected[2].second, RejectReason::kLowQuality);
  EXPECT_EQ(f.rejected[3].second, RejectReason::kTooShort);
}

TEST(Separation, GateKeepsShapeAndHighPassRemovesDc) {
  std::vector<double> dc(16000, 0.5);
  audio::AudioBuffer buf{dc, 16000};
  const auto hp = HighPass(buf, 80.0);
  double tail = 0;
  for (std::size_t i = 8000; i < 16000; ++i) tail = std::max(tail, std::fabs(hp.samples[i]));
  EXPECT_LT(tail, 1e-3);
  const auto noisy = testing::Mix(SpeechLike(2.0, 200, 1), testing::Noise(2.0, 0.05, 3));
  const auto gated = SpectralGate(noisy);
  EXPECT_EQ(gated.size(), noisy.size());
  EXPECT_EQ(gated.sample_rate, noisy.sample_rate);
  EXPECT_GT(SnrProxyScore(gated, {}), SnrProxyScore(noisy, {}));
}

TEST(Separation, ExternalHooks) {
  const auto buf = SpeechLike(0.5, 150, 1);
  const auto same = ExternalSeparate(buf, "cat");
  ASSERT_EQ(same.size(), buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    EXPECT_EQ(same.samples[i], static_cast<double>(static_cast<float>(buf.samples[i])));
  try {
    ExternalSeparate(buf, "cat >/dev/null; echo broken model >&2; exit 3");
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.exit_code(), 3);
    EXPECT_NE(e.stderr_excerpt().find("broken model"), std::string::npos);
  }
  EXPECT_THROW(ExternalSeparate(buf, "cat >/dev/null; echo not a wav"), StageError);
  EXPECT_EQ(StderrExcerpt(std::string(1000, 'x')).size(), 400u);
}

TEST(Pipeline, SplitLongSpans) {
  const auto pieces = SplitLongSpans({Span{0.0, 65.0, "S0"}}, 30.0);
  ASSERT_EQ(pieces.size(), 3u);
  EXPECT_DOUBLE_EQ(pieces[2].start_s, 60.0);
  EXPECT_EQ(*pieces[2].speaker, "S0");
}

TEST(Pipeline, ManifestInvariantsAndDeterminism) {
  testing::TempDir dir;
  auto paths = testing::WriteCurationCorpus(dir.path().string());
  paths.push_back(dir.File("missing.wav"));
  PipelineConfig cfg;
  const Manifest a = RunPipeline(paths, cfg);
  cfg.jobs = 3;
  const Manifest b = RunPipeline(paths, cfg);
  EXPECT_EQ(SerializeManifest(a), SerializeManifest(b));

  const Manifest m = ParseManifest(SerializeManifest(a));
  EXPECT_EQ(m.header.warnings.size(), 1u);
  EXPECT_GT(m.records.size(), 2u);
  std::size_t rejected = 0;
  for (const auto& [reason, n] : m.header.rejected) rejected += n;
  EXPECT_GT(m.header.rejected.at("too_short"), 0u);
  EXPECT_GT(m.header.rejected.at("low_quality"), 0u);
  EXPECT_EQ(m.header.candidates, m.records.size() + rejected);
  std::set<std::string> ids;
  double seconds = 0;
  std::set<std::string> speakers_in_dialog;
  for (const auto& r : m.records) {
    EXPECT_GE(r.duration_s, 3.0);
    EXPECT_LE(r.duration_s, 30.0);
    EXPECT_GT(r.quality_score, 3.2);
    EXPECT_TRUE(ids.insert(r.id).second);
    seconds += r.duration_s;
    if (r.source_path.find("dialog") != std::string::npos) speakers_in_dialog.insert(*r.speaker);
  }
  EXPECT_EQ(speakers_in_dialog.size(), 2u);
  EXPECT_NEAR(m.header.total_hours, seconds / 3600.0, 1e-12);
  EXPECT_EQ(m.header.config_hash, ConfigHash(m.header.config));
}

TEST(Pipeline, RecordJsonUsesNullForAbsent) {
  SegmentRecord r;
  r.id = "x_0000";
  const nlohmann::json j = r;
  EXPECT_TRUE(j.at("transcript").is_null());
  EXPECT_EQ(j.at("split"), "unsplit");
  const SegmentRecord back = j.get<SegmentRecord>();
  EXPECT_FALSE(back.transcript.has_value());
}

TEST(Pipeline, ConfigValidation) {
  PipelineConfig cfg;
  cfg.min_dur_s = 40.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = PipelineConfig{};
  cfg.quality_threshold = 6.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = PipelineConfig{};
  cfg.separator = "magic";
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

}  // namespace
}  // namespace slmforge::curate
