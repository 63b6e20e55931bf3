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
#include <vector>

#include "boxtask/box.hpp"

namespace boxtask {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MapperConfig {
  int input_dim = 0;
  int hidden = 64;
  int box_dim = 2;
  double size_floor = 1e-6;

  void validate() const;
};

/// Parameters of the box mapper: a 3-layer trunk with a smooth elementwise
/// nonlinearity, followed by two linear heads (min corner, raw sizes). All
/// tensors live in one flat row-major vector so that the optimizer, the
/// checkpoint format, and finite-difference checks can treat the model as a
/// single parameter block.
class MapperParams {
 public:
  MapperParams() = default;
  explicit MapperParams(const MapperConfig& cfg);

  static std::size_t parameter_count(const MapperConfig& cfg);

  const MapperConfig& config() const { return cfg_; }
  Eigen::VectorXd& theta() { return theta_; }
  const Eigen::VectorXd& theta() const { return theta_; }

  // Row-major tensor views into theta, in storage order:
  // w1,b1,w2,b2,w3,b3,w_corner,b_corner,w_size,b_size.
  Eigen::Map<RowMajorMatrix> w1();
  Eigen::Map<RowMajorMatrix> w2();
  Eigen::Map<RowMajorMatrix> w3();
  Eigen::Map<RowMajorMatrix> w_corner();
  Eigen::Map<RowMajorMatrix> w_size();
  Eigen::Map<Eigen::VectorXd> b1();
  Eigen::Map<Eigen::VectorXd> b2();
  Eigen::Map<Eigen::VectorXd> b3();
  Eigen::Map<Eigen::VectorXd> b_corner();
  Eigen::Map<Eigen::VectorXd> b_size();

  Eigen::Map<const RowMajorMatrix> w1() const;
  Eigen::Map<const RowMajorMatrix> w2() const;
  Eigen::Map<const RowMajorMatrix> w3() const;
  Eigen::Map<const RowMajorMatrix> w_corner() const;
  Eigen::Map<const RowMajorMatrix> w_size() const;
  Eigen::Map<const Eigen::VectorXd> b1() const;
  Eigen::Map<const Eigen::VectorXd> b2() const;
  Eigen::Map<const Eigen::VectorXd> b3() const;
  Eigen::Map<const Eigen::VectorXd> b_corner() const;
  Eigen::Map<const Eigen::VectorXd> b_size() const;

 private:
  MapperConfig cfg_;
  Eigen::VectorXd theta_;
};

/// Glorot-uniform weights, zero biases, except the size-head bias which is
/// chosen so a zero-weight network emits boxes with sides exactly 0.5
/// (including the size floor). Deterministic per seed.
MapperParams init_params(const MapperConfig& cfg, std::uint64_t seed);

/// Trunk nonlinearity. Smooth, so finite-difference gradient checks behave,
/// and bounded, so unseen inputs cannot drive the heads far outside the
/// range spanned during training (novel-task embeddings stay in scale).
double trunk_activation(double x);
double trunk_activation_grad(double x);

/// Activations kept for the backward pass.
struct ForwardCache {
  Eigen::VectorXd x;        // input
  Eigen::VectorXd a1, a2, a3;  // pre-activations
  Eigen::VectorXd h1, h2, h3;  // post-activations
  Eigen::VectorXd raw_size;    // size head output before softplus
};

/// Upstream gradient on a box's (min, size).
struct BoxGrad {
  Eigen::VectorXd dmin;
  Eigen::VectorXd dsize;
};

/// Maps an input vector to a box. Sides are softplus(raw) + size_floor, so
/// the Box invariant holds by construction. Throws on dimension mismatch.
Box forward(const MapperParams& p, const Eigen::VectorXd& x,
            ForwardCache* cache = nullptr);

/// Accumulates exact reverse-mode gradients of the forward map into
/// grad_theta (same layout as theta). Throws on shape mismatch.
void backward(const MapperParams& p, const ForwardCache& cache, const BoxGrad& g,
              Eigen::VectorXd& grad_theta);

/// Batched form: sums per-sample parameter gradients. Accumulation follows
/// the input order, so a fixed batch order gives bitwise-stable results.
void backward_batch(const MapperParams& p, const std::vector<ForwardCache>& caches,
                    const std::vector<BoxGrad>& grads, Eigen::VectorXd& grad_theta);

/// Per-dimension z-scoring fit on training inputs and stored alongside the
/// checkpoint so novel tasks go through the identical transform.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // floored away from zero

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

Standardizer fit_standardizer(const std::vector<Eigen::VectorXd>& inputs,
                              double stddev_floor = 1e-8);
Standardizer identity_standardizer(int dim);

}  // namespace boxtask
