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

#include <vector>

#include "boxtask/box.hpp"
#include "boxtask/data.hpp"
#include "boxtask/mapper.hpp"

namespace boxtask {

/// Weights of the composite objective. Per observed pair the loss is
///   overlap_weight * (smooth overlap - target)^2 + lambda_d * gated center pull,
/// and per distinct box in the batch
///   shape regularizer(alpha, beta) + gamma_a * volume-vs-size penalty.
/// gamma_a = 0 disables the volume term; overlap_weight exists so ablations
/// can switch the overlap term off.
struct LossWeights {
  double overlap_weight = 1.0;
  double lambda_d = 1.0;
  double alpha = 1.0;
  double beta = 0.01;
  double gamma_a = 0.0;

  void validate() const;
};

/// Squared error between a predicted overlap and its target in [0,1].
double overlap_loss(double predicted, double target);

/// Center pull: the Euclidean distance between box centers, applied only
/// when the pair is related (target > 0) and the boxes are currently
/// disjoint. Zero otherwise. Gradients flow through the centers only.
double center_pull_loss(const Box& zi, const Box& zj, double target);

/// Shape regularizer: (alpha/k^2) * sum_{a<b} |s_a - s_b| + beta * vol^{-1/k}
/// with the exact volume. Pushes boxes toward cubes and away from collapse.
double shape_regularizer(const Box& z, double alpha, double beta);

/// Volume supervision: (smooth volume - normalized_size)^2.
double volume_match_loss(const Box& z, double normalized_size, const Temperatures& t);

struct BatchLoss {
  double value = 0.0;
  Eigen::VectorXd grad;  // empty when gradients were not requested
};

/// Composite loss over a batch of pairs:
///   mean over pairs of [overlap + lambda_d * center pull]
/// + mean over distinct boxes in the batch of [regularizer + gamma_a * volume match].
/// Pair indices refer to `inputs` (already standardized); `normalized_sizes`,
/// when present, supplies the volume-match targets per task.
/// Gradients are exact reverse-mode through the mapper; evaluation is
/// parallelized over fixed-size chunks with an ordered reduction, so results
/// do not depend on the worker count.
BatchLoss total_loss(const MapperParams& params,
                     const std::vector<Eigen::VectorXd>& inputs,
                     const std::vector<PairExample>& pairs,
                     const LossWeights& weights, const Temperatures& temps,
                     const std::vector<double>* normalized_sizes = nullptr,
                     bool with_grad = true);

}  // namespace boxtask
