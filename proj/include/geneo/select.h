// Copyright 2026 The geneo-select Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GENEO_SELECT_H_
#define GENEO_SELECT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geneo/operator.h"
#include "geneo/rng.h"

namespace geneo {

// r points on the unit sphere S^{m-1}, one per selected operator.
struct Configuration {
  std::vector<Eigen::VectorXd> points;

  int r() const { return static_cast<int>(points.size()); }
  int m() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
  // Largest | ||u_i|| - 1 |.
  double MaxUnitDefect() const;
};

// Pairs closer than this in the Q quadratic form count as coincident.
double CollisionGuard(const GramMatrix& q);

// sum_{i<j} 1 / ((u_i - u_j)^T Q (u_i - u_j)). Throws CollisionError when a
// pair is within the collision guard.
double Energy(const Configuration& cfg, const GramMatrix& q);

// Euclidean gradient: dE/du_i = sum_{j != i} -2 Q (u_i - u_j) / d_ij^2.
std::vector<Eigen::VectorXd> EnergyGradient(const Configuration& cfg,
                                            const GramMatrix& q);

// Projects each g_i onto the tangent space at u_i: g_i - (g_i . u_i) u_i.
std::vector<Eigen::VectorXd> RiemannianGradient(
    const Configuration& cfg, const std::vector<Eigen::VectorXd>& euclid_grad);

// Normalize(u + step). If u + step vanishes the step is halved until it does
// not.
Eigen::VectorXd Retract(const Eigen::VectorXd& u, const Eigen::VectorXd& step);

struct OptimizerOptions {
  double tol = 1e-6;
  int max_evals = 3000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  // A line search that shrinks below this declares the run stalled.
  double min_step = 1e-30;
};

enum class Termination { kToleranceMet, kMaxEvals, kStalled };

std::string ToString(Termination termination);

struct SelectionResult {
  Configuration final;
  // Energy of every accepted iterate, starting with the initial one.
  std::vector<double> energy_trace;
  // max_i of the Riemannian gradient norm at `final`.
  double grad_norm = 0.0;
  // Energy evaluations, line-search trials included.
  int evals = 0;
  int iterations = 0;
  Termination termination = Termination::kStalled;
  std::uint64_t seed = 0;
};

// Riemannian gradient descent on (S^{m-1})^r with backtracking Armijo line
// search and retraction by normalization. Stops when the largest per-point
// Riemannian gradient norm drops below tol, when max_evals energy
// evaluations have been spent, or when the line search cannot make progress.
// A trial step that collides is treated as a failed trial.
SelectionResult Optimize(const Configuration& start, const GramMatrix& q,
                         const OptimizerOptions& options = {});

// Normalized standard-normal vector: uniform on S^{m-1}.
Eigen::VectorXd SampleSphere(int m, Rng& rng);

// r independent sphere samples, redrawn until no pair collides. Throws
// CollisionError after 100 failed draws.
Configuration RandomConfiguration(int r, int m, Rng& rng, const GramMatrix& q);

struct NearestDistances {
  double optimized;
  double baseline;
};

// min_i d(u, M_i) and min_j d(u, M0_j), d the Q quadratic form.
NearestDistances Nearest(const Eigen::VectorXd& u,
                         const Configuration& optimized,
                         const Configuration& baseline, const GramMatrix& q);

// min_i d(u, M_i) / min_j d(u, M0_j) with d the Q quadratic form of the
// parameter difference, i.e. squared L2 operator distance. Throws
// CollisionError when the baseline minimum is within the collision guard.
double Eta(const Eigen::VectorXd& u, const Configuration& optimized,
           const Configuration& baseline, const GramMatrix& q);

// Evenly spaced points on the unit circle: the reference optimum for m = 2,
// Q = I.
Configuration EquallySpacedCircle(int r);

}  // namespace geneo

#endif  // GENEO_SELECT_H_
