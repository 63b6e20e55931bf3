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

#include <Eigen/Dense>
#include <optional>

namespace boxtask {

/// k-dimensional axis-aligned box stored as (min corner, side lengths).
/// Strict positivity of the sides is a representation invariant; the
/// constructor rejects anything else, so downstream volume code never
/// needs degenerate-extent guards.
struct Box {
  Eigen::VectorXd min;
  Eigen::VectorXd size;

  Box() = default;
  Box(Eigen::VectorXd min_corner, Eigen::VectorXd sides);

  int dim() const { return static_cast<int>(min.size()); }
  Eigen::VectorXd max() const { return min + size; }
  Eigen::VectorXd center() const { return min + 0.5 * size; }
};

/// Smoothing temperatures for differentiable volume and intersection.
struct Temperatures {
  double tau_vol = 0.1;
  double tau_int = 1e-4;

  void validate() const;
};

/// Result of a smoothed intersection. Unlike Box, the per-dimension extent
/// hi - lo may be zero or negative: that is exactly what the smoothed
/// volume consumes to produce small-but-nonzero gradients for disjoint
/// boxes.
struct Span {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::VectorXd extents() const { return hi - lo; }
};

// ---------------------------------------------------------------------------
// Scalar helpers (numerically stable forms).
// ---------------------------------------------------------------------------

double sigmoid(double x);
double softplus(double x);
/// Inverse of softplus; defined for y > 0.
double softplus_inv(double y);
/// tau-scaled log-sum-exp upper bound of {a, b}; tends to max(a, b) as tau -> 0.
double smooth_max(double a, double b, double tau);
double smooth_min(double a, double b, double tau);

// ---------------------------------------------------------------------------
// Exact geometry.
// ---------------------------------------------------------------------------

/// Product of side lengths; strictly positive by the Box invariant.
double hard_volume(const Box& b);

/// Componentwise [max of mins, min of maxes]; empty if any dimension has
/// nonpositive extent.
std::optional<Box> hard_intersection(const Box& a, const Box& b);

Eigen::VectorXd center(const Box& b);
double center_distance(const Box& a, const Box& b);

// ---------------------------------------------------------------------------
// Smoothed geometry.
// ---------------------------------------------------------------------------

/// Per-dimension tau_vol * softplus(extent / tau_vol), multiplied across
/// dimensions. Strictly positive for any extents; converges to the exact
/// volume as tau_vol -> 0 for positive extents.
double smooth_volume(const Box& b, const Temperatures& t);
double smooth_volume_of_extents(const Eigen::VectorXd& extents, double tau_vol);

/// Smoothed intersection: per-dimension smooth max of the mins and smooth
/// min of the maxes at temperature tau_int. Symmetric in its arguments.
Span smooth_intersection(const Box& a, const Box& b, const Temperatures& t);

enum class OverlapMode { kHard, kSmooth };

/// Directed overlap score: vol(a intersect b) / vol(a). The hard mode is
/// exactly in [0, 1]. The smooth mode can exceed 1 by a smoothing-induced
/// epsilon; it is returned unclamped so gradients stay alive, and callers
/// clamp at reporting boundaries only.
double overlap_fraction(const Box& a, const Box& b, const Temperatures& t,
                        OverlapMode mode);

/// Clamp for reporting boundaries. Never use inside loss evaluation.
double clamp_unit(double v);

/// Gradients of the smooth overlap fraction with respect to both boxes'
/// (min, size) parameters.
struct OverlapGrad {
  Eigen::VectorXd a_min, a_size, b_min, b_size;
};

/// Smooth overlap fraction, optionally with analytic gradients.
double smooth_overlap_fraction(const Box& a, const Box& b, const Temperatures& t,
                               OverlapGrad* grad = nullptr);

/// Smooth volume with d(vol)/d(size).
double smooth_volume_with_grad(const Box& b, const Temperatures& t,
                               Eigen::VectorXd& dsize);

}  // namespace boxtask
