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

#include "boxtask/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "boxtask/parallel.hpp"

namespace boxtask {

void LossWeights::validate() const {
  const double all[] = {overlap_weight, lambda_d, alpha, beta, gamma_a};
  for (double w : all) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("LossWeights: weights must be finite and >= 0");
    }
  }
}

double overlap_loss(double predicted, double target) {
  if (!(target >= 0.0 && target <= 1.0)) {
    throw std::invalid_argument("overlap_loss: target must be in [0,1]");
  }
  const double diff = predicted - target;
  return diff * diff;
}

double center_pull_loss(const Box& zi, const Box& zj, double target) {
  if (!(target > 0.0)) return 0.0;
  if (hard_intersection(zi, zj).has_value()) return 0.0;
  return center_distance(zi, zj);
}

double shape_regularizer(const Box& z, double alpha, double beta) {
  const int k = z.dim();
  double spread = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      spread += std::fabs(z.size[a] - z.size[b]);
    }
  }
  const double vol = hard_volume(z);
  return alpha / (static_cast<double>(k) * k) * spread +
         beta * std::pow(vol, -1.0 / static_cast<double>(k));
}

double volume_match_loss(const Box& z, double normalized_size, const Temperatures& t) {
  const double diff = smooth_volume(z, t) - normalized_size;
  return diff * diff;
}

namespace {

constexpr std::size_t kPairChunk = 64;

// Analytic gradient of the shape regularizer w.r.t. the sides.
void shape_regularizer_grad(const Box& z, double alpha, double beta, double scale,
                            Eigen::VectorXd& dsize) {
  const int k = z.dim();
  const double vol = hard_volume(z);
  const double vol_term = beta * std::pow(vol, -1.0 / static_cast<double>(k));
  for (int c = 0; c < k; ++c) {
    double g = 0.0;
    for (int d = 0; d < k; ++d) {
      if (d == c) continue;
      const double diff = z.size[c] - z.size[d];
      if (diff > 0.0) g += 1.0;
      else if (diff < 0.0) g -= 1.0;
    }
    g *= alpha / (static_cast<double>(k) * k);
    g -= vol_term / (static_cast<double>(k) * z.size[c]);
    dsize[c] += scale * g;
  }
}

// All distinct tasks of a batch are pushed through the trunk as one matrix
// (columns = tasks); the backward pass mirrors it. This is the training hot
// path, so it must be matrix products end to end.
struct BatchedForward {
  Eigen::MatrixXd x;               // input_dim x T
  Eigen::MatrixXd a1, h1, a2, h2, a3, h3;
  Eigen::MatrixXd raw_size;        // k x T
  Eigen::MatrixXd mins, sizes;     // k x T
};

BatchedForward forward_all(const MapperParams& p, const Eigen::MatrixXd& x) {
  const MapperConfig& c = p.config();
  BatchedForward f;
  f.x = x;
  f.a1 = (p.w1() * x).colwise() + p.b1();
  f.h1 = f.a1.unaryExpr(&trunk_activation);
  f.a2 = (p.w2() * f.h1).colwise() + p.b2();
  f.h2 = f.a2.unaryExpr(&trunk_activation);
  f.a3 = (p.w3() * f.h2).colwise() + p.b3();
  f.h3 = f.a3.unaryExpr(&trunk_activation);
  f.mins = (p.w_corner() * f.h3).colwise() + p.b_corner();
  f.raw_size = (p.w_size() * f.h3).colwise() + p.b_size();
  f.sizes = f.raw_size.unaryExpr(&softplus).array() + c.size_floor;
  return f;
}

void backward_all(const MapperParams& p, const BatchedForward& f,
                  const Eigen::MatrixXd& dmin, const Eigen::MatrixXd& dsize,
                  Eigen::VectorXd& grad_theta) {
  const MapperConfig& c = p.config();
  MapperParams views(c);  // layout only; used as mutable tensor views
  views.theta() = std::move(grad_theta);

  const Eigen::MatrixXd draw = dsize.cwiseProduct(f.raw_size.unaryExpr(&sigmoid));
  views.w_corner() += dmin * f.h3.transpose();
  views.b_corner() += dmin.rowwise().sum();
  views.w_size() += draw * f.h3.transpose();
  views.b_size() += draw.rowwise().sum();

  Eigen::MatrixXd dh3 = p.w_corner().transpose() * dmin + p.w_size().transpose() * draw;
  Eigen::MatrixXd da3 = dh3.cwiseProduct(f.a3.unaryExpr(&trunk_activation_grad));
  views.w3() += da3 * f.h2.transpose();
  views.b3() += da3.rowwise().sum();

  Eigen::MatrixXd dh2 = p.w3().transpose() * da3;
  Eigen::MatrixXd da2 = dh2.cwiseProduct(f.a2.unaryExpr(&trunk_activation_grad));
  views.w2() += da2 * f.h1.transpose();
  views.b2() += da2.rowwise().sum();

  Eigen::MatrixXd dh1 = p.w2().transpose() * da2;
  Eigen::MatrixXd da1 = dh1.cwiseProduct(f.a1.unaryExpr(&trunk_activation_grad));
  views.w1() += da1 * f.x.transpose();
  views.b1() += da1.rowwise().sum();

  grad_theta = std::move(views.theta());
}

}  // namespace

BatchLoss total_loss(const MapperParams& params,
                     const std::vector<Eigen::VectorXd>& inputs,
                     const std::vector<PairExample>& pairs,
                     const LossWeights& weights, const Temperatures& temps,
                     const std::vector<double>* normalized_sizes, bool with_grad) {
  weights.validate();
  temps.validate();
  const int n_tasks = static_cast<int>(inputs.size());
  for (const PairExample& p : pairs) {
    if (p.i < 0 || p.i >= n_tasks || p.j < 0 || p.j >= n_tasks) {
      throw std::invalid_argument("total_loss: pair references unknown task index");
    }
  }
  if (weights.gamma_a > 0.0 &&
      (normalized_sizes == nullptr || normalized_sizes->size() != inputs.size())) {
    throw std::invalid_argument(
        "total_loss: volume supervision requires a normalized size per task");
  }

  BatchLoss out;
  if (with_grad) {
    out.grad = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(MapperParams::parameter_count(params.config())));
  }
  if (pairs.empty()) return out;

  // Distinct tasks in order of first appearance.
  std::vector<int> slot_task;
  std::unordered_map<int, int> slot_of;
  slot_task.reserve(pairs.size());
  for (const PairExample& p : pairs) {
    for (int t : {p.i, p.j}) {
      if (slot_of.emplace(t, static_cast<int>(slot_task.size())).second) {
        slot_task.push_back(t);
      }
    }
  }
  const std::size_t n_slots = slot_task.size();
  const int k = params.config().box_dim;

  // Forward every distinct task once, as one batched trunk evaluation.
  Eigen::MatrixXd x(params.config().input_dim, static_cast<Eigen::Index>(n_slots));
  for (std::size_t s = 0; s < n_slots; ++s) {
    const Eigen::VectorXd& in = inputs[static_cast<std::size_t>(slot_task[s])];
    if (in.size() != params.config().input_dim) {
      throw std::invalid_argument("total_loss: input dimension mismatch");
    }
    x.col(static_cast<Eigen::Index>(s)) = in;
  }
  const BatchedForward fwd = forward_all(params, x);
  std::vector<Box> boxes;
  boxes.reserve(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    boxes.emplace_back(fwd.mins.col(static_cast<Eigen::Index>(s)),
                       fwd.sizes.col(static_cast<Eigen::Index>(s)));
  }

  // Pair terms. Each chunk owns a scalar partial loss and per-slot box-grad
  // accumulators; chunks are reduced in index order afterwards.
  const double pair_norm = 1.0 / static_cast<double>(pairs.size());
  const std::size_t n_chunks = chunk_count(pairs.size(), kPairChunk);
  std::vector<double> chunk_loss(n_chunks, 0.0);
  std::vector<Eigen::VectorXd> chunk_boxgrad(
      with_grad ? n_chunks : 0);
  if (with_grad) {
    for (auto& g : chunk_boxgrad) {
      g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_slots) * 2 * k);
    }
  }

  parallel_chunks(pairs.size(), kPairChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t pi = b; pi < e; ++pi) {
      const PairExample& p = pairs[pi];
      const int si = slot_of.at(p.i);
      const int sj = slot_of.at(p.j);
      const Box& zi = boxes[static_cast<std::size_t>(si)];
      const Box& zj = boxes[static_cast<std::size_t>(sj)];

      OverlapGrad og;
      const double pred =
          smooth_overlap_fraction(zi, zj, temps, with_grad ? &og : nullptr);
      chunk_loss[c] += weights.overlap_weight * overlap_loss(pred, p.target);

      const bool pull_open =
          p.target > 0.0 && !hard_intersection(zi, zj).has_value();
      double dist = 0.0;
      if (pull_open) {
        dist = center_distance(zi, zj);
        chunk_loss[c] += weights.lambda_d * dist;
      }

      if (!with_grad) continue;
      Eigen::VectorXd& acc = chunk_boxgrad[c];
      auto dmin = [&](int slot) {
        return acc.segment(static_cast<Eigen::Index>(slot) * 2 * k, k);
      };
      auto dsize = [&](int slot) {
        return acc.segment(static_cast<Eigen::Index>(slot) * 2 * k + k, k);
      };

      const double dpred =
          weights.overlap_weight * 2.0 * (pred - p.target) * pair_norm;
      dmin(si) += dpred * og.a_min;
      dsize(si) += dpred * og.a_size;
      dmin(sj) += dpred * og.b_min;
      dsize(sj) += dpred * og.b_size;

      if (pull_open && dist > 0.0) {
        const Eigen::VectorXd u =
            (zi.center() - zj.center()) * (weights.lambda_d * pair_norm / dist);
        dmin(si) += u;
        dsize(si) += 0.5 * u;
        dmin(sj) -= u;
        dsize(sj) -= 0.5 * u;
      }
    }
  });

  double value = 0.0;
  for (double l : chunk_loss) value += l;
  value *= pair_norm;

  Eigen::VectorXd box_grads;
  if (with_grad) {
    box_grads = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_slots) * 2 * k);
    for (const auto& g : chunk_boxgrad) box_grads += g;
  }

  // Per-box terms, averaged over the distinct boxes in the batch.
  const double box_norm = 1.0 / static_cast<double>(n_slots);
  double box_value = 0.0;
  for (std::size_t s = 0; s < n_slots; ++s) {
    const Box& z = boxes[s];
    box_value += shape_regularizer(z, weights.alpha, weights.beta);
    if (weights.gamma_a > 0.0) {
      const double target = (*normalized_sizes)[static_cast<std::size_t>(slot_task[s])];
      box_value += weights.gamma_a * volume_match_loss(z, target, temps);
    }
    if (!with_grad) continue;
    Eigen::VectorXd dsize = Eigen::VectorXd::Zero(k);
    shape_regularizer_grad(z, weights.alpha, weights.beta, box_norm, dsize);
    if (weights.gamma_a > 0.0) {
      const double target = (*normalized_sizes)[static_cast<std::size_t>(slot_task[s])];
      Eigen::VectorXd dvol(k);
      const double vol = smooth_volume_with_grad(z, temps, dvol);
      dsize += (weights.gamma_a * box_norm * 2.0 * (vol - target)) * dvol;
    }
    box_grads.segment(static_cast<Eigen::Index>(s) * 2 * k + k, k) += dsize;
  }
  value += box_value * box_norm;
  out.value = value;

  if (!with_grad) return out;

  // One batched backward pass through the mapper.
  Eigen::MatrixXd dmin(k, static_cast<Eigen::Index>(n_slots));
  Eigen::MatrixXd dsize(k, static_cast<Eigen::Index>(n_slots));
  for (std::size_t s = 0; s < n_slots; ++s) {
    dmin.col(static_cast<Eigen::Index>(s)) =
        box_grads.segment(static_cast<Eigen::Index>(s) * 2 * k, k);
    dsize.col(static_cast<Eigen::Index>(s)) =
        box_grads.segment(static_cast<Eigen::Index>(s) * 2 * k + k, k);
  }
  backward_all(params, fwd, dmin, dsize, out.grad);
  return out;
}

}  // namespace boxtask
