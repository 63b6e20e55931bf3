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

#include <cmath>
#include <stdexcept>

namespace boxtask {

Box::Box(Eigen::VectorXd min_corner, Eigen::VectorXd sides)
    : min(std::move(min_corner)), size(std::move(sides)) {
  if (min.size() != size.size()) {
    throw std::invalid_argument("Box: min corner and sides must share the dimension");
  }
  if (min.size() == 0) throw std::invalid_argument("Box: dimension must be >= 1");
  for (Eigen::Index d = 0; d < size.size(); ++d) {
    if (!(size[d] > 0.0) || !std::isfinite(size[d]) || !std::isfinite(min[d])) {
      throw std::invalid_argument("Box: sides must be finite and strictly positive");
    }
  }
}

void Temperatures::validate() const {
  if (!(tau_vol > 0.0) || !(tau_int > 0.0)) {
    throw std::invalid_argument("Temperatures: tau_vol and tau_int must be > 0");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("softplus_inv: argument must be > 0");
  // log(exp(y) - 1) = y + log(1 - exp(-y)), stable for large y.
  return y + std::log(-std::expm1(-y));
}

double smooth_max(double a, double b, double tau) {
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + tau * std::log1p(std::exp((lo - hi) / tau));
}

double smooth_min(double a, double b, double tau) {
  return -smooth_max(-a, -b, tau);
}

double hard_volume(const Box& b) { return b.size.prod(); }

std::optional<Box> hard_intersection(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("hard_intersection: dimension mismatch");
  }
  Eigen::VectorXd lo = a.min.cwiseMax(b.min);
  Eigen::VectorXd hi = a.max().cwiseMin(b.max());
  Eigen::VectorXd ext = hi - lo;
  for (Eigen::Index d = 0; d < ext.size(); ++d) {
    if (!(ext[d] > 0.0)) return std::nullopt;
  }
  return Box(std::move(lo), std::move(ext));
}

Eigen::VectorXd center(const Box& b) { return b.center(); }

double center_distance(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("center_distance: dimension mismatch");
  }
  return (a.center() - b.center()).norm();
}

namespace {

// d/de log(tau * softplus(e/tau)) = sigmoid(e/tau) / (tau * softplus(e/tau)).
// Both factors underflow together for very negative extents; the analytic
// limit there is 1/tau, which keeps gradients finite instead of 0/0.
double log_smooth_length_grad(double extent, double tau) {
  const double t = extent / tau;
  if (t < -30.0) return 1.0 / tau;
  return sigmoid(t) / (tau * softplus(t));
}

}  // namespace

double smooth_volume_of_extents(const Eigen::VectorXd& extents, double tau_vol) {
  double v = 1.0;
  for (Eigen::Index d = 0; d < extents.size(); ++d) {
    v *= tau_vol * softplus(extents[d] / tau_vol);
  }
  return v;
}

double smooth_volume(const Box& b, const Temperatures& t) {
  t.validate();
  return smooth_volume_of_extents(b.size, t.tau_vol);
}

Span smooth_intersection(const Box& a, const Box& b, const Temperatures& t) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("smooth_intersection: dimension mismatch");
  }
  t.validate();
  const int k = a.dim();
  Span s;
  s.lo.resize(k);
  s.hi.resize(k);
  const Eigen::VectorXd amax = a.max();
  const Eigen::VectorXd bmax = b.max();
  for (int d = 0; d < k; ++d) {
    s.lo[d] = smooth_max(a.min[d], b.min[d], t.tau_int);
    s.hi[d] = smooth_min(amax[d], bmax[d], t.tau_int);
  }
  return s;
}

double overlap_fraction(const Box& a, const Box& b, const Temperatures& t,
                        OverlapMode mode) {
  if (mode == OverlapMode::kHard) {
    const auto inter = hard_intersection(a, b);
    if (!inter) return 0.0;
    // The intersection is a subset of `a`, but recomputing its extents from
    // max corners can overshoot a.size by an ulp; the exact range is [0,1].
    return clamp_unit(hard_volume(*inter) / hard_volume(a));
  }
  return smooth_overlap_fraction(a, b, t, nullptr);
}

double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double smooth_overlap_fraction(const Box& a, const Box& b, const Temperatures& t,
                               OverlapGrad* grad) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("smooth_overlap_fraction: dimension mismatch");
  }
  t.validate();
  const int k = a.dim();
  const Eigen::VectorXd amax = a.max();
  const Eigen::VectorXd bmax = b.max();

  // Intersection span and its softmax weights per dimension.
  Eigen::VectorXd ext(k), w_lo_a(k), w_hi_a(k);
  for (int d = 0; d < k; ++d) {
    const double lo = smooth_max(a.min[d], b.min[d], t.tau_int);
    const double hi = smooth_min(amax[d], bmax[d], t.tau_int);
    ext[d] = hi - lo;
    w_lo_a[d] = sigmoid((a.min[d] - b.min[d]) / t.tau_int);  // d lo / d a.min
    w_hi_a[d] = sigmoid((bmax[d] - amax[d]) / t.tau_int);    // d hi / d a.max
  }

  const double inter_vol = smooth_volume_of_extents(ext, t.tau_vol);
  const double self_vol = smooth_volume_of_extents(a.size, t.tau_vol);
  const double frac = inter_vol / self_vol;

  if (grad != nullptr) {
    grad->a_min = Eigen::VectorXd::Zero(k);
    grad->a_size = Eigen::VectorXd::Zero(k);
    grad->b_min = Eigen::VectorXd::Zero(k);
    grad->b_size = Eigen::VectorXd::Zero(k);
    for (int d = 0; d < k; ++d) {
      // d frac / d ext_d = frac * d/de log sv(ext_d).
      const double dfrac_dext = frac * log_smooth_length_grad(ext[d], t.tau_vol);
      // d frac / d self-extent_d through the denominator.
      const double dfrac_dself = -frac * log_smooth_length_grad(a.size[d], t.tau_vol);

      // a.max = a.min + a.size: the hi path contributes to both.
      grad->a_min[d] = dfrac_dext * (-w_lo_a[d] + w_hi_a[d]);
      grad->a_size[d] = dfrac_dext * w_hi_a[d] + dfrac_dself;
      grad->b_min[d] = dfrac_dext * (-(1.0 - w_lo_a[d]) + (1.0 - w_hi_a[d]));
      grad->b_size[d] = dfrac_dext * (1.0 - w_hi_a[d]);
    }
  }
  return frac;
}

double smooth_volume_with_grad(const Box& b, const Temperatures& t,
                               Eigen::VectorXd& dsize) {
  t.validate();
  const double v = smooth_volume_of_extents(b.size, t.tau_vol);
  dsize.resize(b.dim());
  for (int d = 0; d < b.dim(); ++d) {
    dsize[d] = v * log_smooth_length_grad(b.size[d], t.tau_vol);
  }
  return v;
}

}  // namespace boxtask
