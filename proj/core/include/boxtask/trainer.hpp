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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxtask/data.hpp"
#include "boxtask/mapper.hpp"
#include "boxtask/objective.hpp"

namespace boxtask {

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  void validate() const;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int max_epochs = 2000;
  int batch_size = 256;
  int patience = 50;
  std::uint64_t seed = 0;
  int box_dim = 2;
  int hidden = 64;
  double size_floor = 1e-6;
  Temperatures temps;
  LossWeights weights;
  SplitFractions fractions;
  int novel_count = 0;
  bool novel_leaves_only = false;
  bool deterministic = false;
  RelationKind mode = RelationKind::kHierarchy;
  double rescale_k = 50.0;  // tanh squash applied to affinity targets; 0 disables

  void validate() const;
};

/// Disjoint pair-index lists into a RelationSet's triples, plus the task ids
/// held out entirely for the novel protocol. Pairs touching a novel task
/// never appear in any list.
struct SplitPlan {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::vector<std::string> novel_ids;
};

/// Uniform pair split, deterministic per seed. Novel tasks are drawn
/// uniformly (optionally from leaves only) and every pair touching one is
/// excluded from all three lists. Throws when the requested sizes cannot be
/// met.
SplitPlan make_splits(const RelationSet& relations, const TaskCollection& tasks,
                      const SplitFractions& fractions, int novel_count,
                      std::uint64_t seed, bool novel_leaves_only = false);

/// Convenience overload taking a novel fraction of the task count.
SplitPlan make_splits(const RelationSet& relations, const TaskCollection& tasks,
                      const SplitFractions& fractions, double novel_fraction,
                      std::uint64_t seed);

/// Keeps a uniform fraction of the training pairs (for supervision studies).
void subsample_train(SplitPlan& plan, double keep_fraction, std::uint64_t seed);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;
};

/// Standard bias-corrected update. State tensors are lazily sized on first
/// use; afterwards any shape mismatch throws.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Trained model plus everything needed to reproduce its preprocessing:
/// standardization statistics, temperatures, loss weights, and the full
/// training configuration (which pins the split plan via its seed).
struct Checkpoint {
  int version = 1;
  MapperParams params;
  Standardizer stand;
  TrainConfig train;

  /// Standardize + forward. Never mutates parameters.
  Box embed(const Eigen::VectorXd& raw) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

struct EpochRecord {
  int epoch;
  double train_loss;
  double val_loss;
};

void write_train_log(const std::string& path, const std::vector<EpochRecord>& log);

struct FitResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> log;
  SplitPlan split;
};

/// Full optimization driver: splits the relations, standardizes inputs on
/// the training tasks, then runs shuffled minibatch epochs of Adam on the
/// composite loss with early stopping on the validation loss. Returns the
/// parameters from the best validation epoch. Affinity targets are squashed
/// by rescale_k before training when requested. A non-finite loss aborts
/// with a diagnostic naming the offending pair.
FitResult fit(const TaskCollection& tasks, const RelationSet& relations,
              const TrainConfig& config);

/// Same driver on a caller-provided split plan (reduced-supervision studies
/// thin plan.train and keep the evaluation splits identical).
FitResult fit_with_split(const TaskCollection& tasks, const RelationSet& relations,
                         const TrainConfig& config, const SplitPlan& split);

/// Embeds unseen task vectors with a frozen checkpoint (one forward pass
/// each, using the stored standardization statistics).
std::vector<Box> embed_novel(const Checkpoint& cp,
                             const std::vector<Eigen::VectorXd>& vectors);

}  // namespace boxtask
