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

#include "boxtask/evaluation.hpp"
#include "boxtask/trainer.hpp"

namespace boxtask {

enum class BaselineMethod { kLinear, kMlp, kKl, kAsymCos, kAsymEuc, kRandom };

std::string baseline_method_name(BaselineMethod m);
BaselineMethod parse_baseline_method(const std::string& name);

enum class KlMode {
  kClipMeanVar,    // vector is [mean || variance]; halves split the dimensions
  kFimPrecision,   // vector holds precisions of zero-mean Gaussians
};

enum class Direction { kGreaterOrEqual, kLess };

/// Classifier over concatenated task vectors: either a single affine layer
/// or a 4-layer perceptron, both with a sigmoid output head.
struct PairClassifier {
  std::vector<Eigen::Index> layer_sizes;  // e.g. {2d, h, h, h, 1} or {2d, 1}
  Eigen::VectorXd theta;

  double predict(const Eigen::VectorXd& x) const;  // sigmoid score in (0,1)
};

PairClassifier init_pair_classifier(int input_dim, bool mlp, int hidden,
                                    std::uint64_t seed);

enum class PairLoss { kBinaryCrossEntropy, kSquaredError };

/// Mean loss over a batch of (input, target); accumulates exact gradients
/// into grad when non-null.
double pair_classifier_loss(const PairClassifier& c,
                            const std::vector<std::pair<Eigen::VectorXd, double>>& batch,
                            PairLoss kind, Eigen::VectorXd* grad = nullptr);

/// Closed-form KL divergence between diagonal Gaussians built from the two
/// statistics vectors. Mean/variance vectors use (mu, var + floor); the
/// precision mode treats entries as precisions, i.e. var = 1/(entry + floor).
double kl_divergence_gaussian(const Eigen::VectorXd& stats_i,
                              const Eigen::VectorXd& stats_j, KlMode mode,
                              double variance_floor = 1e-6);

/// Similarity of e_i to e_j, shifted by the similarity of e_i to a reference
/// embedding: sim(e_i, e_j) - alpha * sim(e_i, e_o). The cosine flavor uses
/// cosine similarity (zero-norm inputs are an error); the Euclidean flavor
/// substitutes the Euclidean distance.
double asym_similarity(const Eigen::VectorXd& e_i, const Eigen::VectorXd& e_j,
                       const Eigen::VectorXd& e_o, double alpha, bool cosine);

/// Componentwise median, used as the reference embedding.
Eigen::VectorXd trivial_embedding(const std::vector<Eigen::VectorXd>& vectors);

struct ThresholdDecision {
  double threshold;
  Direction direction;
  double train_f1;
};

/// Threshold selection over a grid spanning the observed score range, at the
/// same relative grid positions as the fixed containment grid. Ties pick the
/// smallest threshold; constant scores return the grid extreme with a
/// diagnostic.
ThresholdDecision decide_threshold(const std::vector<double>& scores,
                                   const std::vector<int>& labels,
                                   Direction direction);

/// Uniform random predictions: a fair 0/1 coin (hierarchy) or a uniform
/// [0,1] value (affinity). Deterministic per seed.
std::vector<double> random_scores(std::size_t n, bool binary, std::uint64_t seed);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::kLinear;
  KlMode kl_mode = KlMode::kClipMeanVar;
  double variance_floor = 1e-6;
  std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 1.0};
  TrainConfig opt;  // optimizer settings, mode, seed; splits must match the main run
};

/// Runs one baseline on the same splits and calibration pairs as the main
/// model and produces a report in the shared format. KL and the asymmetric
/// similarities apply to hierarchy mode only.
EvalReport run_baseline(const BaselineConfig& config, const TaskCollection& tasks,
                        const RelationSet& relations, const SplitPlan& split,
                        bool novel_protocol = false);

}  // namespace boxtask
