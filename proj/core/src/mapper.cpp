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

#include <cmath>
#include <stdexcept>

#include "boxtask/rng.hpp"

namespace boxtask {

double trunk_activation(double x) { return std::tanh(x); }
double trunk_activation_grad(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

namespace {

struct Offsets {
  std::size_t w1, b1, w2, b2, w3, b3, wc, bc, ws, bs, total;
};

Offsets offsets(const MapperConfig& c) {
  const std::size_t d = static_cast<std::size_t>(c.input_dim);
  const std::size_t h = static_cast<std::size_t>(c.hidden);
  const std::size_t k = static_cast<std::size_t>(c.box_dim);
  Offsets o{};
  o.w1 = 0;
  o.b1 = o.w1 + h * d;
  o.w2 = o.b1 + h;
  o.b2 = o.w2 + h * h;
  o.w3 = o.b2 + h;
  o.b3 = o.w3 + h * h;
  o.wc = o.b3 + h;
  o.bc = o.wc + k * h;
  o.ws = o.bc + k;
  o.bs = o.ws + k * h;
  o.total = o.bs + k;
  return o;
}

// Mutable tensor views over an external flat buffer with the same layout
// as MapperParams::theta(). Used to accumulate gradients without copies.
struct GradViews {
  Eigen::Map<RowMajorMatrix> w1, w2, w3, wc, ws;
  Eigen::Map<Eigen::VectorXd> b1, b2, b3, bc, bs;
};

GradViews grad_views(const MapperConfig& c, double* base) {
  const auto o = offsets(c);
  return GradViews{
      {base + o.w1, c.hidden, c.input_dim}, {base + o.w2, c.hidden, c.hidden},
      {base + o.w3, c.hidden, c.hidden},    {base + o.wc, c.box_dim, c.hidden},
      {base + o.ws, c.box_dim, c.hidden},   {base + o.b1, c.hidden},
      {base + o.b2, c.hidden},              {base + o.b3, c.hidden},
      {base + o.bc, c.box_dim},             {base + o.bs, c.box_dim}};
}

}  // namespace

void MapperConfig::validate() const {
  if (input_dim < 1 || hidden < 1 || box_dim < 1) {
    throw std::invalid_argument("MapperConfig: dimensions must be >= 1");
  }
  if (!(size_floor > 0.0)) {
    throw std::invalid_argument("MapperConfig: size_floor must be > 0");
  }
}

MapperParams::MapperParams(const MapperConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  theta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(cfg)));
}

std::size_t MapperParams::parameter_count(const MapperConfig& cfg) {
  return offsets(cfg).total;
}

#define BOXTASK_MAT_VIEW(NAME, OFF, ROWS, COLS)                                   \
  Eigen::Map<RowMajorMatrix> MapperParams::NAME() {                               \
    const auto o = offsets(cfg_);                                                 \
    return {theta_.data() + o.OFF, (ROWS), (COLS)};                               \
  }                                                                               \
  Eigen::Map<const RowMajorMatrix> MapperParams::NAME() const {                   \
    const auto o = offsets(cfg_);                                                 \
    return {theta_.data() + o.OFF, (ROWS), (COLS)};                               \
  }

#define BOXTASK_VEC_VIEW(NAME, OFF, LEN)                                          \
  Eigen::Map<Eigen::VectorXd> MapperParams::NAME() {                              \
    const auto o = offsets(cfg_);                                                 \
    return {theta_.data() + o.OFF, (LEN)};                                        \
  }                                                                               \
  Eigen::Map<const Eigen::VectorXd> MapperParams::NAME() const {                  \
    const auto o = offsets(cfg_);                                                 \
    return {theta_.data() + o.OFF, (LEN)};                                        \
  }

BOXTASK_MAT_VIEW(w1, w1, cfg_.hidden, cfg_.input_dim)
BOXTASK_MAT_VIEW(w2, w2, cfg_.hidden, cfg_.hidden)
BOXTASK_MAT_VIEW(w3, w3, cfg_.hidden, cfg_.hidden)
BOXTASK_MAT_VIEW(w_corner, wc, cfg_.box_dim, cfg_.hidden)
BOXTASK_MAT_VIEW(w_size, ws, cfg_.box_dim, cfg_.hidden)
BOXTASK_VEC_VIEW(b1, b1, cfg_.hidden)
BOXTASK_VEC_VIEW(b2, b2, cfg_.hidden)
BOXTASK_VEC_VIEW(b3, b3, cfg_.hidden)
BOXTASK_VEC_VIEW(b_corner, bc, cfg_.box_dim)
BOXTASK_VEC_VIEW(b_size, bs, cfg_.box_dim)

#undef BOXTASK_MAT_VIEW
#undef BOXTASK_VEC_VIEW

MapperParams init_params(const MapperConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  MapperParams p(cfg);
  Rng rng(seed);

  auto glorot = [&rng](Eigen::Map<RowMajorMatrix> w, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
  };

  glorot(p.w1(), cfg.input_dim, cfg.hidden);
  glorot(p.w2(), cfg.hidden, cfg.hidden);
  glorot(p.w3(), cfg.hidden, cfg.hidden);
  glorot(p.w_corner(), cfg.hidden, cfg.box_dim);
  glorot(p.w_size(), cfg.hidden, cfg.box_dim);

  // Sides come out as softplus(raw) + size_floor; pick the bias so a
  // zero-weight network emits sides of exactly 0.5.
  const double bias = softplus_inv(0.5 - cfg.size_floor);
  p.b_size().setConstant(bias);
  return p;
}

Box forward(const MapperParams& p, const Eigen::VectorXd& x, ForwardCache* cache) {
  const MapperConfig& c = p.config();
  if (x.size() != c.input_dim) {
    throw std::invalid_argument("forward: input has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(c.input_dim));
  }

  Eigen::VectorXd a1 = p.w1() * x + p.b1();
  Eigen::VectorXd h1 = a1.unaryExpr(&trunk_activation);
  Eigen::VectorXd a2 = p.w2() * h1 + p.b2();
  Eigen::VectorXd h2 = a2.unaryExpr(&trunk_activation);
  Eigen::VectorXd a3 = p.w3() * h2 + p.b3();
  Eigen::VectorXd h3 = a3.unaryExpr(&trunk_activation);

  Eigen::VectorXd min_corner = p.w_corner() * h3 + p.b_corner();
  Eigen::VectorXd raw_size = p.w_size() * h3 + p.b_size();
  Eigen::VectorXd size =
      raw_size.unaryExpr(&softplus) + Eigen::VectorXd::Constant(c.box_dim, c.size_floor);

  if (cache != nullptr) {
    cache->x = x;
    cache->a1 = std::move(a1);
    cache->h1 = std::move(h1);
    cache->a2 = std::move(a2);
    cache->h2 = std::move(h2);
    cache->a3 = std::move(a3);
    cache->h3 = std::move(h3);
    cache->raw_size = raw_size;
  }
  return Box(std::move(min_corner), std::move(size));
}

void backward(const MapperParams& p, const ForwardCache& cache, const BoxGrad& g,
              Eigen::VectorXd& grad_theta) {
  const MapperConfig& c = p.config();
  if (g.dmin.size() != c.box_dim || g.dsize.size() != c.box_dim) {
    throw std::invalid_argument("backward: upstream gradient has wrong box dimension");
  }
  if (grad_theta.size() !=
      static_cast<Eigen::Index>(MapperParams::parameter_count(c))) {
    throw std::invalid_argument("backward: gradient buffer has wrong size");
  }

  GradViews v = grad_views(c, grad_theta.data());

  // size = softplus(raw) + floor.
  Eigen::VectorXd draw =
      g.dsize.cwiseProduct(cache.raw_size.unaryExpr(&sigmoid));

  v.wc += g.dmin * cache.h3.transpose();
  v.bc += g.dmin;
  v.ws += draw * cache.h3.transpose();
  v.bs += draw;

  Eigen::VectorXd dh3 =
      p.w_corner().transpose() * g.dmin + p.w_size().transpose() * draw;
  Eigen::VectorXd da3 = dh3.cwiseProduct(cache.a3.unaryExpr(&trunk_activation_grad));
  v.w3 += da3 * cache.h2.transpose();
  v.b3 += da3;

  Eigen::VectorXd dh2 = p.w3().transpose() * da3;
  Eigen::VectorXd da2 = dh2.cwiseProduct(cache.a2.unaryExpr(&trunk_activation_grad));
  v.w2 += da2 * cache.h1.transpose();
  v.b2 += da2;

  Eigen::VectorXd dh1 = p.w2().transpose() * da2;
  Eigen::VectorXd da1 = dh1.cwiseProduct(cache.a1.unaryExpr(&trunk_activation_grad));
  v.w1 += da1 * cache.x.transpose();
  v.b1 += da1;
}

void backward_batch(const MapperParams& p, const std::vector<ForwardCache>& caches,
                    const std::vector<BoxGrad>& grads, Eigen::VectorXd& grad_theta) {
  if (caches.size() != grads.size()) {
    throw std::invalid_argument("backward_batch: caches/grads length mismatch");
  }
  for (std::size_t i = 0; i < caches.size(); ++i) {
    backward(p, caches[i], grads[i], grad_theta);
  }
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw std::invalid_argument("Standardizer: input dimension mismatch");
  }
  return (x - mean).cwiseQuotient(stddev);
}

Standardizer fit_standardizer(const std::vector<Eigen::VectorXd>& inputs,
                              double stddev_floor) {
  if (inputs.empty()) {
    throw std::invalid_argument("fit_standardizer: no inputs");
  }
  const Eigen::Index d = inputs.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& x : inputs) {
    if (x.size() != d) throw std::invalid_argument("fit_standardizer: ragged inputs");
    mean += x;
  }
  mean /= static_cast<double>(inputs.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& x : inputs) {
    var += (x - mean).cwiseAbs2();
  }
  var /= static_cast<double>(inputs.size());
  Standardizer s;
  s.mean = std::move(mean);
  s.stddev = var.cwiseSqrt().cwiseMax(stddev_floor);
  return s;
}

Standardizer identity_standardizer(int dim) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(dim);
  s.stddev = Eigen::VectorXd::Ones(dim);
  return s;
}

}  // namespace boxtask
