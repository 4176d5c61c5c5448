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

#ifndef GENEO_OPERATOR_H_
#define GENEO_OPERATOR_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geneo/grid.h"
#include "geneo/group.h"
#include "json.hpp"

namespace geneo {

// Behavioural operator between signal spaces: a pure function plus the grids
// it maps between. Linear or not; equivariance and non-expansiveness are
// properties checked below, not assumed.
class Operator {
 public:
  using Fn = std::function<Signal(const Signal&)>;

  Operator(std::string name, TorusGrid domain, TorusGrid codomain, Fn fn);

  static Operator Identity(const TorusGrid& grid);
  static Operator Zero(const TorusGrid& grid);

  // Throws std::invalid_argument when phi is not on the domain grid.
  Signal operator()(const Signal& phi) const;

  const std::string& name() const { return name_; }
  const TorusGrid& domain() const { return domain_; }
  const TorusGrid& codomain() const { return codomain_; }

  Operator Scaled(double factor) const;

 private:
  std::string name_;
  TorusGrid domain_;
  TorusGrid codomain_;
  Fn fn_;
};

// Pointwise F1 - F2.
Operator Difference(const Operator& f1, const Operator& f2);

// (1 - t) F1 + t F2 pointwise. Throws std::invalid_argument unless
// 0 <= t <= 1 and the grids agree.
Operator ConvexCombo(const Operator& f1, const Operator& f2, double t);

using Homomorphism = std::function<GridIsometry(const GridIsometry&)>;

Homomorphism IdentityHomomorphism();

// Domain signal distribution, codomain grid and the homomorphism T relating
// the two groups. Equivalence constants come from each grid.
struct OperatorContext {
  WeightedSignalSpace domain;
  TorusGrid codomain;
  Homomorphism T;

  // T = identity, codomain = domain grid.
  static OperatorContext SameSpace(WeightedSignalSpace space);
};

// max over sampled pairs of the distances T(g1 g2) vs T(g1) T(g2) and
// T(id) vs id, counted as mismatched sites. Zero for a homomorphism.
int HomomorphismDefect(const OperatorContext& ctx,
                       const std::vector<GridIsometry>& sample);

// How a sample that lands on a pixel boundary (odd k or h) is resolved.
enum class BoundaryRule {
  // Average of the two pixels sharing the boundary.
  kMidpoint,
  // Pixel cells are half-open [-pi/n, pi/n); the boundary belongs to the
  // upper cell. Offset is floor((r a + 1) / 2).
  kHalfOpen,
};

std::string ToString(BoundaryRule rule);
// Accepts "midpoint" and "half-open". Throws std::invalid_argument.
BoundaryRule ParseBoundaryRule(const std::string& text);

// floor((r a + 1) / 2) for r in {-1, 1}.
int HalfOpenOffset(int r, int a);

struct ShiftTap {
  int di;
  int dj;
  double weight;
};

// One (t, r, s) term: the value at (i, j) + (r k_t, s h_t) / 2 pixels.
struct ShiftTableEntry {
  int t;
  int r;
  int s;
  std::vector<ShiftTap> taps;
};

// The m generator maps S_t phi = sum over r, s in {-1, 1} of phi sampled at
// the (r k_t, s h_t) half-pixel offset, on a fixed grid with fixed k and h.
class ShiftGenerators {
 public:
  // Throws std::invalid_argument for empty or mismatched tuples or
  // nonpositive entries.
  ShiftGenerators(TorusGrid grid, std::vector<int> k, std::vector<int> h,
                  BoundaryRule rule);

  const TorusGrid& grid() const { return grid_; }
  int m() const { return static_cast<int>(k_.size()); }
  const std::vector<int>& k() const { return k_; }
  const std::vector<int>& h() const { return h_; }
  BoundaryRule rule() const { return rule_; }
  const std::vector<ShiftTableEntry>& shift_table() const { return table_; }

  // S_t phi for t in [0, m).
  Signal Apply(int t, const Signal& phi) const;
  // sum_t w_t S_t phi / (4 sqrt(m)), for any weight vector w.
  Signal Mix(const Eigen::VectorXd& w, const Signal& phi) const;

 private:
  TorusGrid grid_;
  std::vector<int> k_;
  std::vector<int> h_;
  BoundaryRule rule_;
  std::vector<ShiftTableEntry> table_;
  // taps_[t] merges the four (r, s) entries of generator t.
  std::vector<std::vector<ShiftTap>> taps_;
};

// F_u(phi) = sum_t u_t S_t phi / (4 sqrt(m)) with u on the unit sphere.
class ShiftMixtureGeneo {
 public:
  ShiftMixtureGeneo(ShiftGenerators generators, Eigen::VectorXd u,
                    bool renormalized);

  const ShiftGenerators& generators() const { return generators_; }
  const TorusGrid& grid() const { return generators_.grid(); }
  int m() const { return generators_.m(); }
  const Eigen::VectorXd& u() const { return u_; }
  // True when the supplied u was off the sphere by more than 1e-12 and got
  // rescaled.
  bool renormalized() const { return renormalized_; }

  Signal Apply(const Signal& phi) const { return generators_.Mix(u_, phi); }
  Operator AsOperator() const;

 private:
  ShiftGenerators generators_;
  Eigen::VectorXd u_;
  bool renormalized_;
};

inline constexpr double kUnitTolerance = 1e-12;

// Throws std::invalid_argument for a zero or non-finite u, a length other
// than m, or bad k/h. Off-sphere u is rescaled and flagged.
ShiftMixtureGeneo MakeShiftMixture(const TorusGrid& grid, Eigen::VectorXd u,
                                   std::vector<int> k, std::vector<int> h,
                                   BoundaryRule rule = BoundaryRule::kMidpoint);
ShiftMixtureGeneo MakeShiftMixture(const ShiftGenerators& generators,
                                   Eigen::VectorXd u);

// The same formula with an arbitrary weight vector. Linear in w; a GEO, and
// non-expansive when ||w||_2 <= 1.
Operator ShiftMixtureWithWeights(const ShiftGenerators& generators,
                                 Eigen::VectorXd w);

nlohmann::json ToJson(const ShiftMixtureGeneo& f);
ShiftMixtureGeneo ShiftMixtureFromJson(const nlohmann::json& j);

struct NonexpansiveReport {
  double max_ratio = 0.0;
  int pairs = 0;
  int violations = 0;
  bool ok = true;
};

// Largest ||F(a) - F(b)||_V / ||a - b||_V over `trials` pairs. Pairs cycle
// through support signals (when the space has two or more), random signals
// with entries in [-1, 1], and a random signal against a constant offset of
// itself. A ratio above 1 + tol is a violation.
NonexpansiveReport CheckNonexpansive(const Operator& f,
                                     const WeightedSignalSpace& space,
                                     int trials, double tol,
                                     std::uint64_t seed = 1);

struct EquivarianceReport {
  double max_defect = 0.0;
  std::string worst_element;
  int checks = 0;
  bool ok = true;
};

// max over g and phi of ||F(phi g) - F(phi) T(g)||_inf.
EquivarianceReport CheckEquivariance(const Operator& f,
                                     const std::vector<GridIsometry>& group,
                                     const std::vector<Signal>& signals,
                                     const Homomorphism& T, double tol);

// Weighted sum over the domain support of <F1(phi), F2(phi)>.
double OpInner(const Operator& f1, const Operator& f2,
               const OperatorContext& ctx);
// max ||F(phi)||_inf, max ||F(phi)||_V and the weighted root-mean-square of
// ||F(phi)||_V over the support.
double OpNormInf(const Operator& f, const OperatorContext& ctx);
double OpNormV2(const Operator& f, const OperatorContext& ctx);
double OpNormL2(const Operator& f, const OperatorContext& ctx);

// m x m matrix with (u - u')^T Q (u - u') = |||F_u - F_u'|||_L2^2 for the
// shift mixtures of a fixed generator set.
class GramMatrix {
 public:
  explicit GramMatrix(Eigen::MatrixXd q);

  static GramMatrix Identity(int m) {
    return GramMatrix(Eigen::MatrixXd::Identity(m, m));
  }

  int m() const { return static_cast<int>(q_.rows()); }
  const Eigen::MatrixXd& matrix() const { return q_; }
  double trace() const { return q_.trace(); }
  double QuadraticForm(const Eigen::VectorXd& v) const { return v.dot(q_ * v); }
  double Distance2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return QuadraticForm(a - b);
  }
  double MinEigenvalue() const;
  // All eigenvalues >= -1e-9 trace.
  bool IsPsd() const;

  GramMatrix Scaled(double c) const { return GramMatrix(q_ * c); }

 private:
  Eigen::MatrixXd q_;
};

// Q_ab = sum_s f_s <S_a phi_s, S_b phi_s> / (16 m).
GramMatrix ComputeGramMatrix(const ShiftGenerators& generators,
                             const WeightedSignalSpace& space);

std::string GramToCsv(const GramMatrix& q);

}  // namespace geneo

#endif  // GENEO_OPERATOR_H_
