// tests/unit/cli_test.cpp

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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "slmforge/audio/wav.hpp"
#include "slmforge/cli/config.hpp"
#include "slmforge/common/subprocess.hpp"
#include "synth.hpp"
#include "toy.hpp"

namespace slmforge::cli {
namespace {

ProcessResult Cmd(const std::string& args) {
  return RunProcess(std::string(SLMFORGE_BIN) + " " + args, "");
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Put(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(Cli, HelpListsEverySubcommand) {
  const auto r = Cmd("--help");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* cmd : {"curate", "pretrain", "finetune-asr", "transcribe", "build-sft",
                          "train-aligner", "infer", "eval", "report"}) {
    EXPECT_NE(r.stdout_data.find(cmd), std::string::npos) << cmd;
    EXPECT_EQ(Cmd(std::string(cmd) + " --help").exit_code, 0) << cmd;
  }
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(Cmd("bogus").exit_code, 1);
  EXPECT_EQ(Cmd("").exit_code, 1);
  EXPECT_EQ(Cmd("--no-such-flag report").exit_code, 1);
  EXPECT_EQ(Cmd("report").exit_code, 1);
  EXPECT_EQ(Cmd("--jobs 0 report --input " SLMFORGE_FIXTURE_DIR "/pretraining_wer.json").exit_code, 1);
  EXPECT_EQ(Cmd("report --format xml --input " SLMFORGE_FIXTURE_DIR "/pretraining_wer.json").exit_code, 1);
  const auto bogus = Cmd("bogus");
  EXPECT_FALSE(bogus.stderr_data.empty() && bogus.stdout_data.empty());
}

TEST(Cli, RuntimeErrorsExitTwo) {
  testing::TempDir dir;
  Put(dir.File("refs.txt"), "a b\nc d\n");
  Put(dir.File("hyps.txt"), "a b\n");
  Put(dir.File("bad.json"), "{not json");
  const auto mismatch = Cmd("eval --refs " + dir.File("refs.txt") + " --hyps " + dir.File("hyps.txt"));
  EXPECT_EQ(mismatch.exit_code, 2);
  EXPECT_NE(mismatch.stderr_data.find("error"), std::string::npos);
  EXPECT_EQ(Cmd("report --input " + dir.File("bad.json")).exit_code, 2);
  EXPECT_EQ(Cmd("--config " + dir.File("bad.json") + " eval --refs " + dir.File("refs.txt") +
                " --hyps " + dir.File("refs.txt")).exit_code, 2);
}

TEST(Cli, ReportMatchesGolden) {
  testing::TempDir dir;
  const auto r = Cmd("report --input " SLMFORGE_FIXTURE_DIR "/cot_asr.json");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.stdout_data, Slurp(SLMFORGE_FIXTURE_DIR "/cot_asr.txt"));
  ASSERT_EQ(Cmd("report --format json --input " SLMFORGE_FIXTURE_DIR "/cot_translation.json --out " +
                dir.File("t4.json")).exit_code, 0);
  const auto j = nlohmann::json::parse(Slurp(dir.File("t4.json")));
  EXPECT_EQ(j.at("rows").size(), 3u);
}

TEST(Cli, EvalWritesScoresAndConfigHash) {
  testing::TempDir dir;
  Put(dir.File("refs.txt"), "a b c\nd e\n");
  Put(dir.File("hyps.txt"), "a x c\nd e\n");
  Put(dir.File("ext.json"), "{\"bs_f1\": 79.78}");
  const std::string args = "eval --refs " + dir.File("refs.txt") + " --hyps " + dir.File("hyps.txt") +
                           " --metrics wer,cer,chrf --external-scores " + dir.File("ext.json");
  const auto r = Cmd("-q " + args + " --out " + dir.File("a.json"));
  ASSERT_EQ(r.exit_code, 0) << r.stderr_data;
  EXPECT_NE(r.stdout_data.find("WER (↓)"), std::string::npos);
  EXPECT_NE(r.stdout_data.find("20.00"), std::string::npos);
  EXPECT_NE(r.stdout_data.find("BS-F1 (↑)"), std::string::npos);
  const auto a = nlohmann::json::parse(Slurp(dir.File("a.json")));
  EXPECT_NEAR(a.at("scores").at("wer").get<double>(), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(a.at("scores").at("bs_f1").get<double>(), 79.78);
  EXPECT_FALSE(a.at("config_hash").get<std::string>().empty());
  EXPECT_EQ(a.at("config").at("command"), "eval");

  ASSERT_EQ(Cmd("-q --jobs 3 " + args + " --out " + dir.File("b.json")).exit_code, 0);
  ASSERT_EQ(Cmd("-q --seed 9 " + args + " --out " + dir.File("c.json")).exit_code, 0);
  const auto b = nlohmann::json::parse(Slurp(dir.File("b.json")));
  const auto c = nlohmann::json::parse(Slurp(dir.File("c.json")));
  EXPECT_EQ(a.at("config_hash"), b.at("config_hash"));
  EXPECT_NE(a.at("config_hash"), c.at("config_hash"));
  EXPECT_EQ(c.at("config").at("run").at("seed"), 9);
}

TEST(Cli, SeedFlagBeatsEnvironment) {
  testing::TempDir dir;
  Put(dir.File("refs.txt"), "a\n");
  const std::string args = " eval --refs " + dir.File("refs.txt") + " --hyps " + dir.File("refs.txt");
  ASSERT_EQ(RunProcess("SLMFORGE_SEED=5 " + std::string(SLMFORGE_BIN) + " -q" + args + " --out " +
                           dir.File("env.json"), "").exit_code, 0);
  ASSERT_EQ(RunProcess("SLMFORGE_SEED=5 " + std::string(SLMFORGE_BIN) + " -q --seed 6" + args +
                           " --out " + dir.File("flag.json"), "").exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(Slurp(dir.File("env.json")))["config"]["run"]["seed"], 5);
  EXPECT_EQ(nlohmann::json::parse(Slurp(dir.File("flag.json")))["config"]["run"]["seed"], 6);
  EXPECT_EQ(RunProcess("SLMFORGE_SEED=abc " + std::string(SLMFORGE_BIN) + args, "").exit_code, 1);
}

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) {
    if (const char* old = std::getenv(kSeedEnv)) old_ = old;
    if (value) setenv(kSeedEnv, value, 1);
    else unsetenv(kSeedEnv);
  }
  ~EnvGuard() {
    if (old_.empty()) unsetenv(kSeedEnv);
    else setenv(kSeedEnv, old_.c_str(), 1);
  }

 private:
  std::string old_;
};

TEST(RunConfig, Precedence) {
  testing::TempDir dir;
  Put(dir.File("c.json"), "{\"seed\": 3, \"jobs\": 4, \"sample_rate\": 8000}");
  {
    EnvGuard env(nullptr);
    EXPECT_EQ(ResolveRunConfig("", std::nullopt, std::nullopt, false, std::nullopt).seed, 0u);
    const auto rc = ResolveRunConfig(dir.File("c.json"), std::nullopt, std::nullopt, false, std::nullopt);
    EXPECT_EQ(rc.seed, 3u);
    EXPECT_EQ(rc.jobs, 4);
    EXPECT_EQ(rc.sample_rate, 8000);
  }
  {
    EnvGuard env("11");
    EXPECT_EQ(ResolveRunConfig(dir.File("c.json"), std::nullopt, std::nullopt, false, std::nullopt).seed, 11u);
    const auto rc = ResolveRunConfig(dir.File("c.json"), 12, 2, true, 22050);
    EXPECT_EQ(rc.seed, 12u);
    EXPECT_EQ(rc.jobs, 1);
    EXPECT_TRUE(rc.deterministic);
    EXPECT_EQ(rc.sample_rate, 22050);
  }
}

TEST(RunConfig, HashIgnoresJobsOnly) {
  RunConfig a, b;
  a.jobs = 1;
  b.jobs = 8;
  const nlohmann::json eff = {{"x", 1}};
  EXPECT_EQ(Resolve("curate", a, eff).hash, Resolve("curate", b, eff).hash);
  b.seed = 1;
  EXPECT_NE(Resolve("curate", a, eff).hash, Resolve("curate", b, eff).hash);
  EXPECT_NE(Resolve("curate", a, eff).hash, Resolve("curate", a, {{"x", 2}}).hash);
  EXPECT_NE(Resolve("curate", a, eff).hash, Resolve("pretrain", a, eff).hash);
}

TEST(Cli, CurateIsReproducible) {
  testing::TempDir dir;
  const auto wavs = testing::WriteCurationCorpus(dir.path().string());
  std::string inputs;
  for (const auto& w : wavs) inputs += " " + w;
  ASSERT_EQ(Cmd("-q --seed 4 --jobs 2 curate --out " + dir.File("a.jsonl") + inputs).exit_code, 0);
  ASSERT_EQ(Cmd("-q --seed 4 --deterministic curate --out " + dir.File("b.jsonl") + inputs).exit_code, 0);
  const auto a = Slurp(dir.File("a.jsonl"));
  EXPECT_FALSE(a.empty());
  EXPECT_NE(a.find("config_hash"), std::string::npos);
  const auto b = Slurp(dir.File("b.jsonl"));
  ASSERT_EQ(Cmd("-q --seed 4 --deterministic curate --out " + dir.File("c.jsonl") + inputs).exit_code, 0);
  EXPECT_EQ(b, Slurp(dir.File("c.jsonl")));
}

TEST(Cli, PretrainIsReproducible) {
  testing::TempDir dir;
  std::string manifest;
  int i = 0;
  for (const char* word : {"abc", "dab"}) {
    const std::string wav = dir.File(std::string(word) + ".wav");
    audio::WriteWav(wav, testing::ToneWord(word));
    manifest += nlohmann::json{{"id", "u" + std::to_string(i++)}, {"source_path", wav},
                               {"duration_s", 0.0}, {"transcript", word}}.dump() + "\n";
  }
  Put(dir.File("m.jsonl"), manifest);
  Put(dir.File("cfg.json"), R"({
    "encoder": {"conv_strides": [2], "conv_channels": 16, "width": 16, "layers": 1,
                "heads": 2, "ffn_width": 32, "num_classes": 8},
    "spectral": {"n_mels": 20},
    "pretrain": {"k": 8, "batch_seconds": 10}
  })");
  const std::string base = "-q --deterministic --seed 2 --config " + dir.File("cfg.json") +
                           " pretrain --steps 5 --manifest " + dir.File("m.jsonl");
  ASSERT_EQ(Cmd(base + " --out " + dir.File("a.ckpt")).exit_code, 0);
  ASSERT_EQ(Cmd(base + " --out " + dir.File("b.ckpt")).exit_code, 0);
  EXPECT_EQ(Slurp(dir.File("a.ckpt")), Slurp(dir.File("b.ckpt")));
  ASSERT_EQ(Cmd("-q --deterministic --seed 3 --config " + dir.File("cfg.json") +
                " pretrain --steps 5 --manifest " + dir.File("m.jsonl") + " --out " + dir.File("c.ckpt"))
                .exit_code, 0);
  EXPECT_NE(Slurp(dir.File("a.ckpt")), Slurp(dir.File("c.ckpt")));
}

}  // namespace
}  // namespace slmforge::cli
