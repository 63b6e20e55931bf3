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

#include "boxtask/box.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "boxtask/rng.hpp"
#include "oracles.hpp"

namespace boxtask {
namespace {

Box make_box(std::initializer_list<double> mins, std::initializer_list<double> sizes) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(mins.size()));
  Eigen::VectorXd s(static_cast<Eigen::Index>(sizes.size()));
  Eigen::Index i = 0;
  for (double v : mins) m[i++] = v;
  i = 0;
  for (double v : sizes) s[i++] = v;
  return Box(std::move(m), std::move(s));
}

Box random_box(Rng& rng, int k, double min_extent = 1.0, double max_extent = 2.5) {
  Eigen::VectorXd m(k), s(k);
  for (int d = 0; d < k; ++d) {
    m[d] = rng.uniform(-1.5, 1.5);
    s[d] = rng.uniform(min_extent, max_extent);
  }
  return Box(std::move(m), std::move(s));
}

TEST(BoxInvariants, ConstructorRejectsBadSides) {
  EXPECT_THROW(make_box({0.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(make_box({0.0}, {-1.0}), std::invalid_argument);
  EXPECT_THROW(make_box({0.0, 0.0}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(make_box({0.0}, {1e-9}));
}

TEST(HardVolume, KnownValues) {
  EXPECT_DOUBLE_EQ(hard_volume(make_box({0, 0}, {1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(hard_volume(make_box({3, -2}, {2, 5})), 10.0);
  EXPECT_DOUBLE_EQ(hard_volume(make_box({0, 0, 0, 0, 0}, {1, 1, 1, 1, 1})), 1.0);
}

TEST(HardIntersection, OneDimensional) {
  const auto inter = hard_intersection(make_box({0}, {2}), make_box({1}, {2}));
  ASSERT_TRUE(inter.has_value());
  EXPECT_DOUBLE_EQ(inter->min[0], 1.0);
  EXPECT_DOUBLE_EQ(inter->size[0], 1.0);

  EXPECT_FALSE(hard_intersection(make_box({0}, {1}), make_box({2}, {1})).has_value());
  // Touching boxes have an empty (measure-zero) intersection.
  EXPECT_FALSE(hard_intersection(make_box({0}, {1}), make_box({1}, {1})).has_value());
}

TEST(HardIntersection, TwoDimensionalAgainstGrid) {
  const Box a = make_box({0, 0}, {2, 2});
  const Box b = make_box({1, 1}, {2, 2});
  const auto inter = hard_intersection(a, b);
  ASSERT_TRUE(inter.has_value());
  EXPECT_DOUBLE_EQ(hard_volume(*inter), 1.0);
  // Cross-check the overlap fraction with the grid-integration oracle.
  const double frac = hard_volume(*inter) / hard_volume(a);
  EXPECT_NEAR(frac, oracles::grid_overlap_fraction(a, b), 2e-3);
}

TEST(SmoothVolume, DirectSoftplusEvaluation) {
  Temperatures t{0.1, 1e-4};
  // One dimension, extent 1: 0.1 * ln(1 + e^{10}).
  EXPECT_NEAR(smooth_volume(make_box({0}, {1}), t), 0.1 * std::log1p(std::exp(10.0)),
              1e-12);
  // Tiny temperature reproduces the exact volume.
  EXPECT_NEAR(smooth_volume(make_box({0}, {1}), Temperatures{1e-3, 1e-4}), 1.0, 1e-9);
}

TEST(SmoothVolume, DegenerateExtentStaysPositive) {
  // softplus(0) = ln 2, so a zero extent contributes tau * ln 2.
  const double v = smooth_volume_of_extents(Eigen::VectorXd::Zero(1), 0.1);
  EXPECT_NEAR(v, 0.1 * std::log(2.0), 1e-15);
  EXPECT_GT(smooth_volume_of_extents(Eigen::VectorXd::Constant(1, -0.5), 0.1), 0.0);
}

TEST(SmoothVolume, MatchesHardVolumeAtLargeExtentRatio) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(5));
    Box b = random_box(rng, k, 0.5, 3.0);
    double min_extent = b.size.minCoeff();
    Temperatures t{min_extent / 41.0, 1e-4};  // every extent/tau > 40
    const double rel =
        std::fabs(smooth_volume(b, t) - hard_volume(b)) / hard_volume(b);
    EXPECT_LT(rel, 1e-6);
  }
}

TEST(SmoothIntersection, ApproachesHardIntersection) {
  Temperatures t{0.1, 1e-4};
  const Box a = make_box({0}, {2});
  const Box b = make_box({1}, {2});
  const Span s = smooth_intersection(a, b, t);
  EXPECT_NEAR(s.lo[0], 1.0, 1e-3);
  EXPECT_NEAR(s.hi[0], 2.0, 1e-3);

  const Span same = smooth_intersection(a, a, t);
  EXPECT_NEAR(same.lo[0], 0.0, 1e-3);
  EXPECT_NEAR(same.hi[0], 2.0, 1e-3);
}

TEST(SmoothIntersection, ExactlySymmetric) {
  Rng rng(13);
  Temperatures t{0.1, 1e-4};
  for (int trial = 0; trial < 100; ++trial) {
    const Box a = random_box(rng, 3);
    const Box b = random_box(rng, 3);
    const Span ab = smooth_intersection(a, b, t);
    const Span ba = smooth_intersection(b, a, t);
    for (int d = 0; d < 3; ++d) {
      EXPECT_EQ(ab.lo[d], ba.lo[d]);
      EXPECT_EQ(ab.hi[d], ba.hi[d]);
    }
  }
}

TEST(SmoothIntersection, CoordinatesCloseWhenMarginLarge) {
  Rng rng(17);
  Temperatures t{0.1, 1e-4};
  int checked = 0;
  while (checked < 100) {
    const Box a = random_box(rng, 2);
    const Box b = random_box(rng, 2);
    const auto inter = hard_intersection(a, b);
    if (!inter) continue;
    if (inter->size.minCoeff() <= 10.0 * t.tau_int) continue;
    const Span s = smooth_intersection(a, b, t);
    for (int d = 0; d < 2; ++d) {
      EXPECT_NEAR(s.lo[d], inter->min[d], 10.0 * t.tau_int);
      EXPECT_NEAR(s.hi[d], inter->min[d] + inter->size[d], 10.0 * t.tau_int);
    }
    ++checked;
  }
}

TEST(OverlapFraction, NestedAsymmetricPair) {
  // Unit square inside a 5x2 box: full containment one way, 0.1 the other.
  const Box z1 = make_box({0, 0}, {1, 1});
  const Box z2 = make_box({-1, -1}, {5, 2});
  Temperatures t;
  EXPECT_DOUBLE_EQ(overlap_fraction(z1, z2, t, OverlapMode::kHard), 1.0);
  EXPECT_DOUBLE_EQ(overlap_fraction(z2, z1, t, OverlapMode::kHard), 0.1);
}

TEST(OverlapFraction, DisjointAndPartial) {
  Temperatures t;
  EXPECT_DOUBLE_EQ(overlap_fraction(make_box({0, 0}, {1, 1}), make_box({5, 5}, {1, 1}),
                                    t, OverlapMode::kHard),
                   0.0);
  // 2x2 squares offset by one: intersection volume 1 over volume 4.
  EXPECT_DOUBLE_EQ(overlap_fraction(make_box({0, 0}, {2, 2}), make_box({1, 1}, {2, 2}),
                                    t, OverlapMode::kHard),
                   0.25);
}

TEST(OverlapFraction, HardStaysInUnitIntervalAndEdgeCases) {
  Rng rng(23);
  Temperatures t;
  bool saw_full = false, saw_empty = false;
  for (int trial = 0; trial < 500; ++trial) {
    const Box a = random_box(rng, 2, 0.2, 2.0);
    const Box b = random_box(rng, 2, 0.2, 2.0);
    const double f = overlap_fraction(a, b, t, OverlapMode::kHard);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    const auto inter = hard_intersection(a, b);
    if (!inter) {
      EXPECT_DOUBLE_EQ(f, 0.0);
      saw_empty = true;
    } else if (std::fabs(hard_volume(*inter) - hard_volume(a)) < 1e-15) {
      EXPECT_DOUBLE_EQ(f, 1.0);
      saw_full = true;
    }
  }
  EXPECT_TRUE(saw_empty);
  (void)saw_full;  // full nesting is rare under this sampler
}

TEST(OverlapFraction, AsymmetryWitness) {
  // a strictly inside b with smaller volume.
  const Box a = make_box({0.25, 0.25}, {0.5, 0.5});
  const Box b = make_box({0, 0}, {1, 1});
  Temperatures t;
  EXPECT_DOUBLE_EQ(overlap_fraction(a, b, t, OverlapMode::kHard), 1.0);
  EXPECT_DOUBLE_EQ(overlap_fraction(b, a, t, OverlapMode::kHard),
                   hard_volume(a) / hard_volume(b));
  EXPECT_LT(overlap_fraction(b, a, t, OverlapMode::kHard), 1.0);
}

TEST(OverlapFraction, GridOracleAgreement) {
  Rng rng(31);
  Temperatures t;
  for (int trial = 0; trial < 100; ++trial) {
    const Box a = random_box(rng, 2);
    const Box b = random_box(rng, 2);
    EXPECT_NEAR(overlap_fraction(a, b, t, OverlapMode::kHard),
                oracles::grid_overlap_fraction(a, b), 2e-3);
  }
}

TEST(OverlapFraction, SmoothTracksHardAwayFromBoundaries) {
  Rng rng(37);
  Temperatures t{0.01, 1e-5};
  for (int trial = 0; trial < 200; ++trial) {
    const Box a = random_box(rng, 2);
    const Box b = random_box(rng, 2);
    const double hard = overlap_fraction(a, b, t, OverlapMode::kHard);
    const double smooth = overlap_fraction(a, b, t, OverlapMode::kSmooth);
    EXPECT_NEAR(smooth, hard, 0.05);
  }
}

TEST(Centers, KnownValues) {
  const Box b = make_box({0, 0}, {2, 2});
  EXPECT_DOUBLE_EQ(center(b)[0], 1.0);
  EXPECT_DOUBLE_EQ(center(b)[1], 1.0);
  EXPECT_DOUBLE_EQ(center_distance(b, b), 0.0);

  const Box p = make_box({-0.5, -0.5}, {1, 1});   // center (0,0)
  const Box q = make_box({2.5, 3.5}, {1, 1});     // center (3,4)
  EXPECT_DOUBLE_EQ(center_distance(p, q), 5.0);
}

TEST(ScalarHelpers, SoftplusInverseRoundTrip) {
  for (double y : {1e-6, 0.1, 0.5, 2.0, 40.0}) {
    EXPECT_NEAR(softplus(softplus_inv(y)), y, 1e-12 * std::max(1.0, y));
  }
  EXPECT_THROW(softplus_inv(0.0), std::invalid_argument);
}

TEST(ScalarHelpers, SmoothMinMaxStableAtTinyTemperature) {
  EXPECT_NEAR(smooth_max(0.0, 1.0, 1e-4), 1.0, 1e-3);
  EXPECT_NEAR(smooth_min(0.0, 1.0, 1e-4), 0.0, 1e-3);
  EXPECT_TRUE(std::isfinite(smooth_max(-1000.0, 1000.0, 1e-4)));
}

TEST(Temperatures, Validation) {
  EXPECT_THROW(Temperatures({0.0, 1e-4}).validate(), std::invalid_argument);
  EXPECT_THROW(Temperatures({0.1, 0.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(Temperatures{}.validate());
}

}  // namespace
}  // namespace boxtask
