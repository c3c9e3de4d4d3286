// tests/unit/nn_test.cpp

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

#include "gradcases.hpp"
#include "oracles.hpp"
#include "slmforge/common/rng.hpp"
#include "slmforge/nn/adam.hpp"
#include "slmforge/nn/checkpoint.hpp"
#include "slmforge/nn/layers.hpp"
#include "slmforge/nn/ops.hpp"
#include "synth.hpp"

namespace slmforge::nn {
namespace {

using testing::MaxGradError;
using testing::RandomLeaf;

TEST(Autodiff, FiniteDifferenceAllOps) {
  for (const auto& c : testing::GradCases()) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      EXPECT_LT(c.run(seed), 1e-4) << c.name << " seed " << seed;
    }
  }
}

TEST(Autodiff, GradientsAccumulateAcrossBackwardCalls) {
  Tensor x = RandomLeaf({2, 2}, 1);
  Sum(x).Backward();
  Sum(x).Backward();
  for (double g : x.grad()) EXPECT_EQ(g, 2.0);
  x.ClearGrad();
  EXPECT_FALSE(x.has_grad());
}

TEST(Autodiff, SharedSubexpression) {
  Tensor x = Tensor::Leaf({3.0}, {1}, true);
  Tensor y = Mul(x, x);
  Sum(Add(y, y)).Backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
}

TEST(Autodiff, NonFiniteRaisesNamingOp) {
  Tensor big = Tensor::Constant({1e308, 1e308}, {2});
  try {
    Scale(big, 10.0);
    FAIL();
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("scale"), std::string::npos);
  }
}

TEST(Autodiff, ShapeErrors) {
  EXPECT_THROW(MatMul(Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3})), ShapeError);
  EXPECT_THROW(Add(Tensor::Zeros({2, 3}), Tensor::Zeros({2})), ShapeError);
  EXPECT_THROW(Tensor::Constant({1.0}, {2}), ShapeError);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor x = RandomLeaf({4, 7}, seed, -10, 10);
    const Tensor s = Softmax(x), ls = LogSoftmax(x);
    for (std::size_t r = 0; r < 4; ++r) {
      double total = 0;
      for (std::size_t c = 0; c < 7; ++c) {
        total += s.at(r, c);
        EXPECT_NEAR(ls.at(r, c), std::log(s.at(r, c)), 1e-9);
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(Ops, LayerNormStatistics) {
  const Tensor x = RandomLeaf({5, 8}, 3, -2, 2);
  const Tensor y = LayerNorm(x, Tensor::Constant(std::vector<double>(8, 1.0), {8}),
                             Tensor::Constant(std::vector<double>(8, 0.0), {8}), 0.0);
  for (std::size_t r = 0; r < 5; ++r) {
    double mean = 0, var = 0;
    for (std::size_t c = 0; c < 8; ++c) mean += y.at(r, c) / 8;
    for (std::size_t c = 0; c < 8; ++c) var += (y.at(r, c) - mean) * (y.at(r, c) - mean) / 8;
    EXPECT_LT(std::fabs(mean), 1e-9);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(Ops, CrossEntropyIgnoresTargetsWhereMaskOff) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t t = 6, v = 5;
    std::vector<int> a(t), b(t);
    std::vector<std::uint8_t> mask(t);
    for (std::size_t i = 0; i < t; ++i) {
      mask[i] = rng.Below(2);
      a[i] = static_cast<int>(rng.Below(v));
      b[i] = mask[i] ? a[i] : static_cast<int>(rng.Below(v));
    }
    Tensor xa = RandomLeaf({t, v}, trial), xb = RandomLeaf({t, v}, trial);
    const Tensor la = CrossEntropy(xa, a, mask), lb = CrossEntropy(xb, b, mask);
    la.Backward();
    lb.Backward();
    EXPECT_EQ(la.item(), lb.item());
    for (std::size_t i = 0; i < t * v; ++i) EXPECT_EQ(xa.grad()[i], xb.grad()[i]);
  }
}

TEST(Ops, CrossEntropyAllMaskedIsZero) {
  Tensor x = RandomLeaf({3, 4}, 1);
  const std::vector<int> tgt{0, 1, 2};
  const std::vector<std::uint8_t> mask{0, 0, 0};
  const Tensor l = CrossEntropy(x, tgt, mask);
  EXPECT_EQ(l.item(), 0.0);
}

TEST(Ops, ConvOutputFrames) {
  Rng rng(1);
  Conv1dLayer conv(3, 2, 4, 2, rng);
  for (std::size_t t : {4u, 5u, 9u, 20u}) {
    EXPECT_EQ(conv.Forward(Tensor::Zeros({t, 3})).dim(0), t / 2);
  }
}

TEST(Layers, CausalAttentionIgnoresFuture) {
  Rng rng(4);
  TransformerBlock block(8, 2, 16, rng);
  Tensor x = RandomLeaf({6, 8}, 2, -1, 1, false);
  const Tensor y = block.Forward(x, true);
  std::vector<double> v(x.values().begin(), x.values().end());
  for (std::size_t c = 0; c < 8; ++c) v[4 * 8 + c] += 1.0;
  const Tensor y2 = block.Forward(Tensor::Constant(v, {6, 8}), true);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(y.at(r, c), y2.at(r, c));
  EXPECT_NE(y.at(4, 0), y2.at(4, 0));
}

TEST(Layers, InitIsTruncatedNormal) {
  Rng rng(7);
  Linear lin(64, 64, rng);
  double mean = 0, sq = 0;
  for (double w : lin.weight().values()) {
    EXPECT_LE(std::fabs(w), 0.04 + 1e-15);
    mean += w;
    sq += w * w;
  }
  const double n = 64 * 64;
  EXPECT_NEAR(mean / n, 0.0, 2e-3);
  EXPECT_NEAR(std::sqrt(sq / n), 0.0176, 2e-3);
  for (double b : lin.bias().values()) EXPECT_EQ(b, 0.0);
}

class Tiny : public Module {
 public:
  explicit Tiny(Rng& rng) : a_(2, 3, rng), b_(3, 1, rng) {
    RegisterModule("a", &a_);
    RegisterModule("b", &b_);
  }
  Tensor Forward(const Tensor& x) const { return b_.Forward(Relu(a_.Forward(x))); }
  Linear& a() { return a_; }

 private:
  Linear a_, b_;
};

TEST(Module, NamesAndFreezing) {
  Rng rng(1);
  Tiny m(rng);
  std::vector<std::string> names;
  for (auto& p : m.Parameters()) names.push_back(p.name);
  EXPECT_EQ(names, (std::vector<std::string>{"a.weight", "a.bias", "b.weight", "b.bias"}));
  m.a().SetFrozen(true);
  EXPECT_EQ(m.TrainableParameters().size(), 2u);
  EXPECT_EQ(m.ParameterCount(), 6u + 3u + 3u + 1u);
}

TEST(Adam, FreshStateAndReferenceUpdate) {
  Tensor w = Tensor::Leaf({1.0, -2.0}, {2}, true);
  Adam opt({{"w", w}}, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  EXPECT_EQ(opt.step_count(), 0);
  EXPECT_EQ(opt.first_moment(0), (std::vector<double>{0, 0}));
  double ref[2] = {1.0, -2.0}, m[2] = {0, 0}, v[2] = {0, 0};
  for (int step = 1; step <= 3; ++step) {
    opt.ZeroGrad();
    Sum(Mul(w, w)).Backward();
    opt.Step();
    for (int i = 0; i < 2; ++i) {
      const double g = 2 * ref[i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      ref[i] -= 0.1 * (m[i] / (1 - std::pow(0.9, step))) /
                (std::sqrt(v[i] / (1 - std::pow(0.999, step))) + 1e-8);
      EXPECT_DOUBLE_EQ(w.at(i), ref[i]);
    }
  }
  opt.Reset();
  EXPECT_EQ(opt.step_count(), 0);
}

TEST(Adam, FrozenParameterUntouchedAndMissingGradThrows) {
  Rng rng(2);
  Tiny m(rng);
  m.a().SetFrozen(true);
  const std::vector<double> before(m.a().weight().values().begin(), m.a().weight().values().end());
  Adam opt(m.Parameters(), {});
  Sum(m.Forward(RandomLeaf({4, 2}, 3, -1, 1, false))).Backward();
  opt.Step();
  EXPECT_EQ(std::vector<double>(m.a().weight().values().begin(), m.a().weight().values().end()), before);
  opt.ZeroGrad();
  EXPECT_THROW(opt.Step(), AutodiffError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(3);
  Tiny m(rng);
  Checkpoint c;
  c.metadata["kind"] = "test";
  AppendModule(c, m, "tiny.");
  const std::string bytes = SerializeCheckpoint(c);
  const Checkpoint back = ParseCheckpoint(bytes);
  EXPECT_EQ(SerializeCheckpoint(back), bytes);
  EXPECT_EQ(back.Meta("kind"), "test");
  Rng other(99);
  Tiny m2(other);
  LoadModule(back, m2, LoadMode::kStrict, "tiny.");
  EXPECT_EQ(SerializeCheckpoint([&] {
              Checkpoint d;
              d.metadata["kind"] = "test";
              AppendModule(d, m2, "tiny.");
              return d;
            }()),
            bytes);
}

TEST(Checkpoint, StrictAndPermissiveLoading) {
  Rng rng(3);
  Tiny m(rng);
  Checkpoint c;
  AppendModule(c, m);
  c.tensors.pop_back();
  Tiny m2(rng);
  EXPECT_THROW(LoadModule(c, m2, LoadMode::kStrict), CheckpointError);
  EXPECT_NO_THROW(LoadModule(c, m2, LoadMode::kPermissive));
  c.tensors[0].shape = {3, 2};
  EXPECT_THROW(LoadModule(c, m2, LoadMode::kStrict), CheckpointError);
  EXPECT_THROW(ParseCheckpoint("SLMX"), CheckpointError);
  std::string bytes = SerializeCheckpoint(c);
  EXPECT_THROW(ParseCheckpoint(bytes.substr(0, bytes.size() - 3)), CheckpointError);
}

TEST(Checkpoint, FileRoundTrip) {
  testing::TempDir dir;
  Rng rng(8);
  Tiny m(rng);
  SaveCheckpoint(m, dir.File("t.ckpt"), {{"k", "v"}});
  Rng other(1);
  Tiny m2(other);
  LoadCheckpoint(dir.File("t.ckpt"), m2);
  const auto p1 = m.Parameters(), p2 = m2.Parameters();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    EXPECT_TRUE(std::equal(p1[i].tensor.values().begin(), p1[i].tensor.values().end(),
                           p2[i].tensor.values().begin()));
  }
}

TEST(Training, SeededTrajectoryIsReproducible) {
  auto run = [] {
    Rng rng(42);
    Tiny m(rng);
    Adam opt(m.Parameters(), {0.01});
    const Tensor x = RandomLeaf({8, 2}, 5, -1, 1, false);
    std::vector<double> losses;
    for (int i = 0; i < 20; ++i) {
      opt.ZeroGrad();
      const Tensor l = Mean(Mul(m.Forward(x), m.Forward(x)));
      l.Backward();
      opt.Step();
      losses.push_back(l.item());
    }
    return losses;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace slmforge::nn
