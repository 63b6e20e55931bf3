/*
 * Copyright 2025 The boxtask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "boxtask/mapper.hpp"

#include <gtest/gtest.h>

#include "boxtask/rng.hpp"

namespace boxtask {
namespace {

MapperConfig small_config() {
  MapperConfig cfg;
  cfg.input_dim = 6;
  cfg.hidden = 16;
  cfg.box_dim = 2;
  return cfg;
}

TEST(InitParams, DeterministicPerSeed) {
  const MapperParams a = init_params(small_config(), 42);
  const MapperParams b = init_params(small_config(), 42);
  EXPECT_TRUE(a.theta() == b.theta());  // bitwise

  const MapperParams c = init_params(small_config(), 43);
  EXPECT_TRUE((a.theta().array() != c.theta().array()).any());
}

TEST(InitParams, RejectsBadDimensions) {
  MapperConfig cfg = small_config();
  cfg.input_dim = 0;
  EXPECT_THROW(init_params(cfg, 1), std::invalid_argument);
  cfg = small_config();
  cfg.box_dim = 0;
  EXPECT_THROW(init_params(cfg, 1), std::invalid_argument);
}

TEST(InitParams, SizeBiasGivesHalfUnitSides) {
  MapperParams p = init_params(small_config(), 7);
  // With all weights zeroed, only the size-head bias shapes the output.
  p.w1().setZero();
  p.w2().setZero();
  p.w3().setZero();
  p.w_corner().setZero();
  p.w_size().setZero();
  p.b1().setZero();
  p.b2().setZero();
  p.b3().setZero();
  p.b_corner().setZero();
  const Box box = forward(p, Eigen::VectorXd::Zero(6));
  for (int d = 0; d < 2; ++d) {
    EXPECT_NEAR(box.size[d], 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(box.min[d], 0.0);
  }
}

TEST(Forward, OutputAlwaysSatisfiesBoxInvariants) {
  Rng rng(99);
  const MapperParams p = init_params(small_config(), 5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(6);
    for (int d = 0; d < 6; ++d) x[d] = rng.uniform(-5.0, 5.0);
    const Box box = forward(p, x);
    for (int d = 0; d < 2; ++d) {
      EXPECT_GE(box.size[d], p.config().size_floor);
      EXPECT_TRUE(std::isfinite(box.min[d]));
    }
  }
}

TEST(Forward, DeterministicGivenParamsAndInput) {
  const MapperParams p = init_params(small_config(), 11);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  const Box a = forward(p, x);
  const Box b = forward(p, x);
  EXPECT_TRUE(a.min == b.min);
  EXPECT_TRUE(a.size == b.size);
}

TEST(Forward, RejectsDimensionMismatch) {
  const MapperParams p = init_params(small_config(), 11);
  EXPECT_THROW(forward(p, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST(Forward, ContinuousInParameters) {
  const MapperParams base = init_params(small_config(), 3);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  const Box b0 = forward(base, x);
  double prev = 1e9;
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    MapperParams p = base;
    p.theta()[17] += delta;
    const Box b1 = forward(p, x);
    const double change =
        (b1.min - b0.min).norm() + (b1.size - b0.size).norm();
    EXPECT_LT(change, prev);
    prev = change;
  }
  EXPECT_LT(prev, 1e-4);
}

// Directional finite-difference check of the raw forward/backward pair:
// random upstream gradients on the box coordinates, compared against the
// change of <upstream, box coords> under parameter perturbation.
TEST(Backward, MatchesFiniteDifferences) {
  Rng rng(2024);
  const MapperParams p = init_params(small_config(), 8);
  Eigen::VectorXd x(6);
  for (int d = 0; d < 6; ++d) x[d] = rng.uniform(-1.0, 1.0);

  BoxGrad up;
  up.dmin = Eigen::VectorXd(2);
  up.dsize = Eigen::VectorXd(2);
  for (int d = 0; d < 2; ++d) {
    up.dmin[d] = rng.uniform(-1.0, 1.0);
    up.dsize[d] = rng.uniform(-1.0, 1.0);
  }

  ForwardCache cache;
  forward(p, x, &cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.theta().size());
  backward(p, cache, up, grad);

  auto scalar = [&](const MapperParams& q) {
    const Box box = forward(q, x);
    return up.dmin.dot(box.min) + up.dsize.dot(box.size);
  };
  MapperParams probe = p;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < probe.theta().size(); i += 7) {  // stride for speed
    const double saved = probe.theta()[i];
    probe.theta()[i] = saved + h;
    const double upv = scalar(probe);
    probe.theta()[i] = saved - h;
    const double downv = scalar(probe);
    probe.theta()[i] = saved;
    const double numeric = (upv - downv) / (2.0 * h);
    const double denom = std::max({std::fabs(numeric), std::fabs(grad[i]), 1e-6});
    EXPECT_LT(std::fabs(numeric - grad[i]) / denom, 1e-4) << "param " << i;
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  const MapperParams p = init_params(small_config(), 8);
  ForwardCache cache;
  forward(p, Eigen::VectorXd::Ones(6), &cache);
  BoxGrad up;
  up.dmin = Eigen::VectorXd::Zero(2);
  up.dsize = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.theta().size());
  backward(p, cache, up, grad);
  EXPECT_DOUBLE_EQ(grad.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, BatchOfTwoIdenticalSamplesDoublesGradient) {
  Rng rng(5);
  const MapperParams p = init_params(small_config(), 8);
  Eigen::VectorXd x(6);
  for (int d = 0; d < 6; ++d) x[d] = rng.uniform(-1.0, 1.0);
  BoxGrad up;
  up.dmin = Eigen::VectorXd::Constant(2, 0.3);
  up.dsize = Eigen::VectorXd::Constant(2, -0.7);

  ForwardCache cache;
  forward(p, x, &cache);
  Eigen::VectorXd single = Eigen::VectorXd::Zero(p.theta().size());
  backward(p, cache, up, single);

  Eigen::VectorXd twice = Eigen::VectorXd::Zero(p.theta().size());
  backward_batch(p, {cache, cache}, {up, up}, twice);
  EXPECT_LT((twice - 2.0 * single).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Backward, RejectsShapeMismatch) {
  const MapperParams p = init_params(small_config(), 8);
  ForwardCache cache;
  forward(p, Eigen::VectorXd::Ones(6), &cache);
  BoxGrad bad;
  bad.dmin = Eigen::VectorXd::Zero(3);
  bad.dsize = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.theta().size());
  EXPECT_THROW(backward(p, cache, bad, grad), std::invalid_argument);
}

TEST(Standardizer, ZScoresWithTrainStatistics) {
  std::vector<Eigen::VectorXd> inputs;
  inputs.push_back(Eigen::Vector2d(1.0, 0.0));
  inputs.push_back(Eigen::Vector2d(3.0, 0.0));
  const Standardizer s = fit_standardizer(inputs);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.stddev[0], 1.0);
  // Constant dimension is floored, not divided by zero.
  EXPECT_GT(s.stddev[1], 0.0);
  const Eigen::VectorXd z = s.apply(Eigen::Vector2d(3.0, 0.0));
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
}

}  // namespace
}  // namespace boxtask
