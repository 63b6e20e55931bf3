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

#include "boxtask/trainer.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <unordered_set>

#include "boxtask/errors.hpp"

namespace boxtask {
namespace {

namespace fs = std::filesystem;

// 11 tasks give 110 ordered non-self pairs; the first 100 are kept so the
// fraction arithmetic is exact.
RelationSet hundred_pairs() {
  RelationSet rel;
  rel.kind = RelationKind::kHierarchy;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      if (i == j) continue;
      rel.triples.push_back(RelationTriple{"t" + std::to_string(i),
                                           "t" + std::to_string(j),
                                           (j == 0 && i != 0) ? 1.0 : 0.0});
    }
  }
  rel.triples.resize(100);
  return rel;
}

TaskCollection ten_tasks() {
  std::vector<TaskRecord> records;
  for (int i = 0; i < 11; ++i) {
    TaskRecord r;
    r.id = "t" + std::to_string(i);
    r.vec = Eigen::VectorXd::LinSpaced(4, 0.0, 1.0) * static_cast<double>(i + 1);
    records.push_back(std::move(r));
  }
  return TaskCollection::from_records(std::move(records));
}

TEST(MakeSplits, ExactSizesOnHundredPairs) {
  const RelationSet rel = hundred_pairs();
  const TaskCollection tasks = ten_tasks();
  const SplitPlan plan = make_splits(rel, tasks, SplitFractions{0.8, 0.1, 0.1}, 0, 7);
  EXPECT_EQ(plan.train.size(), 80u);
  EXPECT_EQ(plan.val.size(), 10u);
  EXPECT_EQ(plan.test.size(), 10u);
  EXPECT_TRUE(plan.novel_ids.empty());

  // Disjointness.
  std::unordered_set<int> seen;
  for (const auto* list : {&plan.train, &plan.val, &plan.test}) {
    for (int t : *list) EXPECT_TRUE(seen.insert(t).second);
  }
}

TEST(MakeSplits, DeterministicPerSeed) {
  const RelationSet rel = hundred_pairs();
  const TaskCollection tasks = ten_tasks();
  const SplitPlan a = make_splits(rel, tasks, SplitFractions{}, 2, 5, false);
  const SplitPlan b = make_splits(rel, tasks, SplitFractions{}, 2, 5, false);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.novel_ids, b.novel_ids);

  const SplitPlan c = make_splits(rel, tasks, SplitFractions{}, 2, 6, false);
  EXPECT_TRUE(a.train != c.train || a.novel_ids != c.novel_ids);
}

TEST(MakeSplits, NovelTasksExcludedEverywhere) {
  const RelationSet rel = hundred_pairs();
  const TaskCollection tasks = ten_tasks();
  const SplitPlan plan = make_splits(rel, tasks, SplitFractions{}, 3, 11, false);
  EXPECT_EQ(plan.novel_ids.size(), 3u);
  std::unordered_set<std::string> novel(plan.novel_ids.begin(), plan.novel_ids.end());
  for (const auto* list : {&plan.train, &plan.val, &plan.test}) {
    for (int t : *list) {
      const RelationTriple& r = rel.triples[static_cast<std::size_t>(t)];
      EXPECT_EQ(novel.count(r.src), 0u);
      EXPECT_EQ(novel.count(r.dst), 0u);
    }
  }
}

TEST(MakeSplits, TooFewRejected) {
  const TaskCollection tasks = ten_tasks();
  RelationSet tiny;
  tiny.kind = RelationKind::kHierarchy;
  tiny.triples.push_back(RelationTriple{"t0", "t1", 1.0});
  // Novel holdout of every task cannot work.
  EXPECT_THROW(make_splits(tiny, tasks, SplitFractions{}, 10, 1, false), DataError);
  // All pairs touch the novel task: nothing left to train on.
  EXPECT_THROW(make_splits(tiny, tasks, SplitFractions{}, 1, 4242, true), DataError);
}

TEST(AdamStep, FirstStepHasLearningRateMagnitude) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd g = Eigen::VectorXd::Constant(1, 2.0);  // gradient of w^2 at w=1
  AdamState state;
  adam_step(w, g, state, 1e-3);
  EXPECT_NEAR(w[0], 0.999, 1e-9);
}

TEST(AdamStep, ZeroGradientLeavesParamsUnchanged) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.5);
  AdamState state;
  for (int t = 0; t < 50; ++t) {
    adam_step(w, Eigen::VectorXd::Zero(3), state, 1e-2);
  }
  EXPECT_DOUBLE_EQ(w[0], 1.5);
  EXPECT_DOUBLE_EQ(w[2], 1.5);
}

TEST(AdamStep, SymmetricAcrossIdenticalCoordinates) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 0.7);
  AdamState state;
  for (int t = 0; t < 10; ++t) {
    adam_step(w, Eigen::VectorXd::Constant(2, -0.3), state, 1e-3);
  }
  EXPECT_DOUBLE_EQ(w[0], w[1]);
}

TEST(AdamStep, ShapeMismatchRejected) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
  AdamState state;
  EXPECT_THROW(adam_step(w, Eigen::VectorXd::Zero(2), state, 1e-3),
               std::invalid_argument);
}

TrainConfig desk_config() {
  TrainConfig cfg;
  cfg.max_epochs = 500;
  cfg.patience = 100;
  cfg.batch_size = 64;
  cfg.hidden = 32;
  cfg.box_dim = 2;
  cfg.seed = 1;
  return cfg;
}

TEST(Fit, TwoLevelHierarchyReachesLowTrainLoss) {
  TaxonomyParams params;
  params.depth = 2;
  params.branching = 3;
  params.leaf_count = 3;
  params.dim = 8;
  params.noise = 0.02;
  params.seed = 4;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  ASSERT_EQ(fixture.tasks.size(), 12);

  TrainConfig cfg = desk_config();
  cfg.fractions = SplitFractions{0.9, 0.1, 0.0};
  const FitResult result = fit(fixture.tasks, fixture.relations, cfg);
  ASSERT_FALSE(result.log.empty());
  double best_train = result.log.front().train_loss;
  for (const EpochRecord& r : result.log) best_train = std::min(best_train, r.train_loss);
  EXPECT_LT(best_train, 0.05);
}

TEST(Fit, ZeroEpochsReturnsInitializedParams) {
  TaxonomyParams params;
  params.depth = 2;
  params.dim = 8;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg = desk_config();
  cfg.max_epochs = 0;
  const FitResult result = fit(fixture.tasks, fixture.relations, cfg);
  EXPECT_TRUE(result.log.empty());

  MapperConfig mcfg;
  mcfg.input_dim = fixture.tasks.dim();
  mcfg.hidden = cfg.hidden;
  mcfg.box_dim = cfg.box_dim;
  const MapperParams expected = init_params(mcfg, cfg.seed);
  EXPECT_TRUE(result.checkpoint.params.theta() == expected.theta());  // bitwise
}

TEST(Fit, DeterministicCheckpoints) {
  TaxonomyParams params;
  params.depth = 2;
  params.dim = 8;
  params.seed = 9;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg = desk_config();
  cfg.max_epochs = 40;
  cfg.deterministic = true;
  const FitResult a = fit(fixture.tasks, fixture.relations, cfg);
  const FitResult b = fit(fixture.tasks, fixture.relations, cfg);
  EXPECT_TRUE(a.checkpoint.params.theta() == b.checkpoint.params.theta());  // bitwise
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
    EXPECT_EQ(a.log[i].val_loss, b.log[i].val_loss);
  }
}

TEST(Fit, ReturnsBestValidationEpoch) {
  TaxonomyParams params;
  params.depth = 2;
  params.dim = 8;
  params.seed = 10;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg = desk_config();
  cfg.max_epochs = 60;
  const FitResult result = fit(fixture.tasks, fixture.relations, cfg);

  double min_val = result.log.front().val_loss;
  for (const EpochRecord& r : result.log) min_val = std::min(min_val, r.val_loss);

  // Recompute the validation loss of the returned parameters; it must equal
  // the minimum recorded value.
  const std::vector<PairExample> all = resolve_relations(fixture.relations, fixture.tasks);
  std::vector<PairExample> val;
  for (int t : result.split.val) val.push_back(all[static_cast<std::size_t>(t)]);
  std::vector<Eigen::VectorXd> inputs;
  for (const TaskRecord& t : fixture.tasks.tasks()) {
    inputs.push_back(result.checkpoint.stand.apply(t.vec));
  }
  const double recomputed =
      total_loss(result.checkpoint.params, inputs, val, cfg.weights, cfg.temps,
                 nullptr, false)
          .value;
  EXPECT_NEAR(recomputed, min_val, 1e-12);
}

TEST(EmbedNovel, DeterministicAndNonMutating) {
  TaxonomyParams params;
  params.depth = 2;
  params.dim = 8;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg = desk_config();
  cfg.max_epochs = 10;
  const FitResult result = fit(fixture.tasks, fixture.relations, cfg);

  const Eigen::VectorXd before = result.checkpoint.params.theta();
  Eigen::VectorXd novel_vec = fixture.tasks.at(0).vec;
  const std::vector<Box> once = embed_novel(result.checkpoint, {novel_vec});
  const std::vector<Box> twice = embed_novel(result.checkpoint, {novel_vec});
  EXPECT_TRUE(once[0].min == twice[0].min);
  EXPECT_TRUE(once[0].size == twice[0].size);
  EXPECT_TRUE(result.checkpoint.params.theta() == before);  // untouched

  EXPECT_THROW(embed_novel(result.checkpoint, {Eigen::VectorXd::Zero(3)}),
               std::invalid_argument);
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  TaxonomyParams params;
  params.depth = 2;
  params.dim = 8;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg = desk_config();
  cfg.max_epochs = 5;
  const FitResult result = fit(fixture.tasks, fixture.relations, cfg);

  const std::string path =
      (fs::temp_directory_path() / ("ckpt_" + std::to_string(::getpid()) + ".json"))
          .string();
  save_checkpoint(path, result.checkpoint);
  const Checkpoint loaded = load_checkpoint(path);
  EXPECT_TRUE(loaded.params.theta() == result.checkpoint.params.theta());  // bitwise
  EXPECT_TRUE(loaded.stand.mean == result.checkpoint.stand.mean);
  EXPECT_EQ(loaded.train.seed, cfg.seed);
  EXPECT_EQ(loaded.train.batch_size, cfg.batch_size);
  fs::remove(path);

  EXPECT_THROW(load_checkpoint("/nonexistent/path.json"), DataError);
}

TEST(SubsampleTrain, KeepsRequestedFraction) {
  SplitPlan plan;
  for (int i = 0; i < 100; ++i) plan.train.push_back(i);
  subsample_train(plan, 0.5, 3);
  EXPECT_EQ(plan.train.size(), 50u);
  std::unordered_set<int> unique(plan.train.begin(), plan.train.end());
  EXPECT_EQ(unique.size(), 50u);
}

}  // namespace
}  // namespace boxtask
