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

#include "boxtask/evaluation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "boxtask/errors.hpp"
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

TEST(F1Score, KnownValues) {
  EXPECT_DOUBLE_EQ(f1_score({1, 0, 1}, {1, 0, 1}).f1, 1.0);
  const F1Result r = f1_score({1, 1, 0, 1, 0}, {1, 1, 1, 0, 0});  // TP=2 FP=1 FN=1
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f1_score({1, 0}, {0, 0}).f1, 0.0);  // all-negative predictions
}

TEST(F1Score, ErrorsAndConventions) {
  EXPECT_THROW(f1_score({1, 0}, {1}), std::invalid_argument);
  EXPECT_THROW(f1_score({0, 0}, {1, 0}), std::invalid_argument);  // no positive truth
  // Harmonic-mean identity.
  const F1Result r = f1_score({1, 1, 0, 0, 1}, {1, 0, 1, 0, 1});
  EXPECT_NEAR(r.f1, 2.0 * r.precision * r.recall / (r.precision + r.recall), 1e-12);
}

TEST(F1Score, BruteForceAgreement) {
  Rng rng(71);
  for (int instance = 0; instance < 300; ++instance) {
    const int n = 2 + static_cast<int>(rng.below(30));
    std::vector<int> truth(n), pred(n);
    bool has_pos = false;
    for (int i = 0; i < n; ++i) {
      truth[i] = rng.uniform() < 0.4 ? 1 : 0;
      pred[i] = rng.uniform() < 0.5 ? 1 : 0;
      has_pos |= truth[i] == 1;
    }
    if (!has_pos) truth[0] = 1;
    const F1Result mine = f1_score(truth, pred);
    const oracles::BruteF1 ref = oracles::brute_f1(truth, pred);
    EXPECT_DOUBLE_EQ(mine.precision, ref.precision);
    EXPECT_DOUBLE_EQ(mine.recall, ref.recall);
    EXPECT_DOUBLE_EQ(mine.f1, ref.f1);
  }
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(spearman_rho({1, 2, 3, 4}, {1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman_rho({1, 2, 3, 4}, {1, 3, 2, 4}), 0.8);
}

TEST(Spearman, ErrorsAndTies) {
  EXPECT_THROW(spearman_rho({1, 2}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(spearman_rho({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
  // Ties get average ranks; cross-check against the counting oracle.
  const std::vector<double> x = {1, 2, 2, 3, 5};
  const std::vector<double> y = {2, 1, 4, 4, 5};
  EXPECT_NEAR(spearman_rho(x, y), oracles::brute_spearman(x, y), 1e-12);
}

TEST(Spearman, BruteForceAgreement) {
  Rng rng(73);
  for (int instance = 0; instance < 300; ++instance) {
    const int n = 3 + static_cast<int>(rng.below(25));
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      // Coarse values force ties regularly.
      x[i] = std::floor(rng.uniform(0.0, 6.0));
      y[i] = std::floor(rng.uniform(0.0, 6.0));
    }
    const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const) x[0] += 1.0;
    if (y_const) y[0] += 1.0;
    EXPECT_NEAR(spearman_rho(x, y), oracles::brute_spearman(x, y), 1e-10);
  }
}

TEST(PredictContainment, ThresholdSemantics) {
  const Box inner = make_box({0.25, 0.25}, {0.5, 0.5});
  const Box outer = make_box({0, 0}, {1, 1});
  const Box far = make_box({9, 9}, {1, 1});
  std::vector<Box> boxes = {inner, outer, far};
  std::vector<PairExample> pairs = {{0, 1, 1.0}, {2, 1, 0.0}};
  const std::vector<double> scores = containment_scores(boxes, pairs);
  const std::vector<int> preds = predict_containment(scores, 0.5);
  EXPECT_EQ(preds[0], 1);  // fully nested
  EXPECT_EQ(preds[1], 0);  // disjoint

  EXPECT_THROW(predict_containment(scores, 0.0), std::invalid_argument);
  EXPECT_THROW(predict_containment(scores, 1.0), std::invalid_argument);
}

TEST(PredictContainment, NestedAsymmetricPairAtHalf) {
  const Box z1 = make_box({0, 0}, {1, 1});
  const Box z2 = make_box({-1, -1}, {5, 2});
  const std::vector<double> scores =
      containment_scores({z1, z2}, {{0, 1, 1.0}, {1, 0, 0.0}});
  const std::vector<int> preds = predict_containment(scores, 0.5);
  EXPECT_EQ(preds[0], 1);
  EXPECT_EQ(preds[1], 0);
}

TEST(PredictContainment, ScaleCovariant) {
  Rng rng(79);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Box> boxes;
    for (int b = 0; b < 6; ++b) {
      Eigen::VectorXd m(2), s(2);
      for (int d = 0; d < 2; ++d) {
        m[d] = rng.uniform(-2, 2);
        s[d] = rng.uniform(0.3, 2.0);
      }
      boxes.emplace_back(m, s);
    }
    std::vector<PairExample> pairs;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i != j) pairs.push_back({i, j, 0.0});
      }
    }
    const double scale = rng.uniform(0.5, 4.0);
    std::vector<Box> scaled;
    for (const Box& b : boxes) scaled.emplace_back(scale * b.min, scale * b.size);
    const auto s0 = containment_scores(boxes, pairs);
    const auto s1 = containment_scores(scaled, pairs);
    const auto p0 = predict_containment(s0, 0.5);
    const auto p1 = predict_containment(s1, 0.5);
    EXPECT_EQ(p0, p1);
  }
}

TEST(CalibrateThreshold, SeparatedClustersAndTieRule) {
  // Positive scores around 0.9, negatives around 0.1: any grid point in
  // between separates perfectly and the smallest wins.
  std::vector<double> scores = {0.92, 0.9, 0.88, 0.1, 0.12, 0.08};
  std::vector<int> labels = {1, 1, 1, 0, 0, 0};
  const double t = calibrate_threshold(scores, labels);
  EXPECT_DOUBLE_EQ(t, 0.15);
}

TEST(CalibrateThreshold, DegenerateCases) {
  std::vector<double> same = {0.4, 0.4, 0.4};
  std::vector<int> labels = {1, 0, 1};
  // All-identical scores: every threshold at or below 0.4 predicts all
  // positive; the tie rule returns the grid minimum.
  EXPECT_DOUBLE_EQ(calibrate_threshold(same, labels), 0.05);

  EXPECT_THROW(calibrate_threshold({0.5, 0.6}, {1, 1}), DataError);
  EXPECT_THROW(calibrate_threshold({0.5, 0.6}, {0, 0}), DataError);
}

TEST(CalibrateThreshold, MatchesExhaustiveGridOracle) {
  Rng rng(83);
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 10 + static_cast<int>(rng.below(40));
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      labels[i] = rng.uniform() < 0.3 ? 1 : 0;
      scores[i] = rng.uniform();
      if (labels[i]) {
        scores[i] = std::min(1.0, scores[i] + 0.3);
        pos = true;
      } else {
        neg = true;
      }
    }
    if (!pos) labels[0] = 1;
    if (!neg) labels[1] = 0;
    const double chosen = calibrate_threshold(scores, labels);
    // Exhaustive re-derivation.
    double best_f1 = -1.0, best_t = 0.0;
    for (double t : threshold_grid()) {
      std::vector<int> preds(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= t ? 1 : 0;
      const oracles::BruteF1 r = oracles::brute_f1(labels, preds);
      if (r.f1 > best_f1) {
        best_f1 = r.f1;
        best_t = t;
      }
    }
    EXPECT_DOUBLE_EQ(chosen, best_t);
    const double chosen_f1 =
        f1_score(labels, predict_containment(scores, chosen)).f1;
    EXPECT_GE(chosen_f1, best_f1 - 1e-12);
  }
}

class NovelProtocolTest : public ::testing::Test {
 protected:
  void SetUp() override {
    TaxonomyParams params;
    params.depth = 2;
    params.branching = 3;
    params.leaf_count = 3;
    params.dim = 8;
    params.noise = 0.02;
    params.seed = 21;
    fixture_ = generate_synthetic_taxonomy(params);
    TrainConfig cfg;
    cfg.max_epochs = 150;
    cfg.patience = 150;
    cfg.batch_size = 64;
    cfg.hidden = 32;
    cfg.seed = 2;
    cfg.novel_count = 2;
    cfg.novel_leaves_only = true;
    result_ = fit(fixture_.tasks, fixture_.relations, cfg);
  }

  SyntheticTaxonomy fixture_;
  FitResult result_;
};

TEST_F(NovelProtocolTest, BothDirectionsAndNoMutation) {
  const Eigen::VectorXd before = result_.checkpoint.params.theta();
  const EvalReport report = evaluate_novel(result_.checkpoint, fixture_.tasks,
                                           fixture_.relations, result_.split);
  EXPECT_TRUE(result_.checkpoint.params.theta() == before);
  EXPECT_EQ(report.split, "novel");

  // Every reported pair touches exactly one novel task, and both directions
  // appear for each (existing, novel) combination in the truth set.
  std::unordered_set<std::string> novel(result_.split.novel_ids.begin(),
                                        result_.split.novel_ids.end());
  long src_novel = 0, dst_novel = 0;
  for (const PairOutcome& p : report.pairs) {
    EXPECT_EQ(novel.count(p.src) + novel.count(p.dst), 1u);
    if (novel.count(p.src)) ++src_novel;
    if (novel.count(p.dst)) ++dst_novel;
  }
  EXPECT_EQ(src_novel, dst_novel);
  EXPECT_EQ(static_cast<long>(report.pairs.size()),
            2L * 2 * (fixture_.tasks.size() - 2));
}

TEST_F(NovelProtocolTest, EmptyNovelListRejected) {
  SplitPlan no_novel = result_.split;
  no_novel.novel_ids.clear();
  EXPECT_THROW(
      evaluate_novel(result_.checkpoint, fixture_.tasks, fixture_.relations, no_novel),
      DataError);
}

TEST_F(NovelProtocolTest, NovelVectorIdenticalToExistingGetsSamePredictions) {
  // Forward determinism: a task whose vector equals an existing one embeds
  // to the identical box.
  const Eigen::VectorXd v = fixture_.tasks.at(5).vec;
  const Box a = result_.checkpoint.embed(v);
  const Box b = result_.checkpoint.embed(v);
  EXPECT_TRUE(a.min == b.min);
  EXPECT_TRUE(a.size == b.size);
}

TEST(NovelIdCollision, DuplicateIdsRejectedAtCollectionBuild) {
  std::vector<TaskRecord> records;
  TaskRecord r;
  r.id = "same";
  r.vec = Eigen::VectorXd::Ones(2);
  records.push_back(r);
  records.push_back(r);
  try {
    TaskCollection::from_records(std::move(records));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("same"), std::string::npos);
  }
}

TEST(DistanceVsGraphDistance, TwoTasksAndIdenticalBoxes) {
  std::vector<TaskRecord> records;
  TaskRecord a;
  a.id = "a";
  a.vec = Eigen::VectorXd::Ones(2);
  TaskRecord b = a;
  b.id = "b";
  b.parent = "a";
  records.push_back(a);
  records.push_back(b);
  const TaskCollection tasks = TaskCollection::from_records(std::move(records));

  std::vector<Box> boxes = {make_box({0, 0}, {1, 1}), make_box({3, 4}, {1, 1})};
  const auto rows = distance_vs_graph_distance(boxes, tasks, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean_center_distance, 5.0);
  EXPECT_DOUBLE_EQ(rows[0].mean_graph_distance, 1.0);

  std::vector<Box> same = {make_box({0, 0}, {1, 1}), make_box({0, 0}, {1, 1})};
  const auto rows2 = distance_vs_graph_distance(same, tasks, 1);
  EXPECT_DOUBLE_EQ(rows2[0].mean_center_distance, 0.0);

  EXPECT_THROW(distance_vs_graph_distance(boxes, tasks, 2), std::invalid_argument);
}

TEST(DistanceVsGraphDistance, MonotoneOnTaxonomyPrototypes) {
  // Boxes built directly from taxonomy prototypes: nearby boxes share
  // ancestors, so the mean graph distance grows with the neighborhood.
  TaxonomyParams params;
  params.depth = 3;
  params.branching = 3;
  params.leaf_count = 3;
  params.dim = 8;
  params.noise = 0.0;
  params.seed = 33;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  std::vector<Box> boxes;
  for (const TaskRecord& t : fixture.tasks.tasks()) {
    // Use the location dimensions past the level markers.
    boxes.emplace_back(t.vec.segment(params.depth, 2), Eigen::Vector2d(0.1, 0.1));
  }
  const int max_m = fixture.tasks.size() - 1;
  const auto rows = distance_vs_graph_distance(boxes, fixture.tasks, max_m);
  ASSERT_EQ(static_cast<int>(rows.size()), max_m);
  std::vector<double> ms, graph;
  for (const auto& r : rows) {
    ms.push_back(static_cast<double>(r.m));
    graph.push_back(r.mean_graph_distance);
  }
  EXPECT_GT(spearman_rho(ms, graph), 0.9);
}

}  // namespace
}  // namespace boxtask
