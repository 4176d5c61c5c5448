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

#include "geneo/operator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

#include "geneo/rng.h"

namespace geneo {
namespace {

// Offsets along one axis for the sample at half-pixel position r * a / 2.
std::vector<std::pair<int, double>> AxisOffsets(int r, int a,
                                                BoundaryRule rule) {
  const int twice = r * a;
  if (twice % 2 == 0) return {{twice / 2, 1.0}};
  if (rule == BoundaryRule::kHalfOpen) return {{HalfOpenOffset(r, a), 1.0}};
  // twice is odd: the neighbours are (twice - 1) / 2 and (twice + 1) / 2.
  return {{(twice - 1) / 2, 0.5}, {(twice + 1) / 2, 0.5}};
}

Signal ApplyTaps(const TorusGrid& grid, const std::vector<ShiftTap>& taps,
                 const Signal& phi) {
  const int n = grid.n();
  std::vector<double> out(grid.site_count(), 0.0);
  const auto values = phi.values();
  for (const ShiftTap& tap : taps) {
    for (int i = 0; i < n; ++i) {
      const double* src = values.data() + grid.Wrap(i + tap.di) * n;
      double* dst = out.data() + i * n;
      const int dj = grid.Wrap(tap.dj);
      for (int j = 0; j < n; ++j) {
        int jj = j + dj;
        if (jj >= n) jj -= n;
        dst[j] += tap.weight * src[jj];
      }
    }
  }
  return Signal(grid, std::move(out));
}

void ValidateTuples(const std::vector<int>& k, const std::vector<int>& h) {
  if (k.empty()) throw std::invalid_argument("k and h must be nonempty");
  if (k.size() != h.size()) {
    throw std::invalid_argument("k and h must have the same length");
  }
  for (std::size_t t = 0; t < k.size(); ++t) {
    if (k[t] < 1 || h[t] < 1) {
      throw std::invalid_argument("k and h entries must be positive integers");
    }
  }
}

Signal RandomSignal(const TorusGrid& grid, Rng& rng) {
  std::vector<double> values(grid.site_count());
  for (double& v : values) v = rng.Uniform(-1.0, 1.0);
  return Signal(grid, std::move(values));
}

}  // namespace

Operator::Operator(std::string name, TorusGrid domain, TorusGrid codomain,
                   Fn fn)
    : name_(std::move(name)),
      domain_(domain),
      codomain_(codomain),
      fn_(std::move(fn)) {}

Operator Operator::Identity(const TorusGrid& grid) {
  return Operator("identity", grid, grid, [](const Signal& phi) { return phi; });
}

Operator Operator::Zero(const TorusGrid& grid) {
  return Operator("zero", grid, grid,
                  [grid](const Signal&) { return Signal::Zero(grid); });
}

Signal Operator::operator()(const Signal& phi) const {
  RequireSameGrid(domain_, phi.grid(), "operator apply");
  return fn_(phi);
}

Operator Operator::Scaled(double factor) const {
  Fn inner = fn_;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g*", factor);
  return Operator(buf + name_, domain_, codomain_,
                  [inner, factor](const Signal& phi) { return inner(phi) * factor; });
}

Operator Difference(const Operator& f1, const Operator& f2) {
  RequireSameGrid(f1.domain(), f2.domain(), "operator difference");
  RequireSameGrid(f1.codomain(), f2.codomain(), "operator difference");
  return Operator("(" + f1.name() + ")-(" + f2.name() + ")", f1.domain(),
                  f1.codomain(),
                  [f1, f2](const Signal& phi) { return f1(phi) - f2(phi); });
}

Operator ConvexCombo(const Operator& f1, const Operator& f2, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("convex weight must lie in [0, 1]");
  }
  RequireSameGrid(f1.domain(), f2.domain(), "convex combination");
  RequireSameGrid(f1.codomain(), f2.codomain(), "convex combination");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return Operator("combo(" + f1.name() + "," + f2.name() + "," + buf + ")",
                  f1.domain(), f1.codomain(), [f1, f2, t](const Signal& phi) {
                    return f1(phi) * (1.0 - t) + f2(phi) * t;
                  });
}

Homomorphism IdentityHomomorphism() {
  return [](const GridIsometry& g) { return g; };
}

OperatorContext OperatorContext::SameSpace(WeightedSignalSpace space) {
  const TorusGrid grid = space.grid();
  return OperatorContext{std::move(space), grid, IdentityHomomorphism()};
}

int HomomorphismDefect(const OperatorContext& ctx,
                       const std::vector<GridIsometry>& sample) {
  auto mismatches = [](const GridIsometry& a, const GridIsometry& b) {
    int count = 0;
    for (std::size_t s = 0; s < a.perm().size(); ++s) {
      count += a.perm()[s] != b.perm()[s];
    }
    return count;
  };
  const GridIsometry id = GridIsometry::Identity(ctx.domain.grid());
  int worst = mismatches(ctx.T(id), GridIsometry::Identity(ctx.codomain));
  for (const GridIsometry& g1 : sample) {
    for (const GridIsometry& g2 : sample) {
      worst = std::max(worst, mismatches(ctx.T(Compose(g1, g2)),
                                         Compose(ctx.T(g1), ctx.T(g2))));
    }
  }
  return worst;
}

std::string ToString(BoundaryRule rule) {
  return rule == BoundaryRule::kMidpoint ? "midpoint" : "half-open";
}

BoundaryRule ParseBoundaryRule(const std::string& text) {
  if (text == "midpoint") return BoundaryRule::kMidpoint;
  if (text == "half-open") return BoundaryRule::kHalfOpen;
  throw std::invalid_argument("unknown boundary rule '" + text +
                              "' (expected midpoint or half-open)");
}

int HalfOpenOffset(int r, int a) {
  const int v = r * a + 1;
  // Floor division by 2 for possibly negative v.
  return v >= 0 ? v / 2 : -((-v + 1) / 2);
}

ShiftGenerators::ShiftGenerators(TorusGrid grid, std::vector<int> k,
                                 std::vector<int> h, BoundaryRule rule)
    : grid_(grid), k_(std::move(k)), h_(std::move(h)), rule_(rule) {
  ValidateTuples(k_, h_);
  taps_.resize(k_.size());
  for (int t = 0; t < m(); ++t) {
    std::map<std::pair<int, int>, double> merged;
    for (int r : {-1, 1}) {
      for (int s : {-1, 1}) {
        ShiftTableEntry entry{t, r, s, {}};
        for (const auto& [di, wi] : AxisOffsets(r, k_[t], rule_)) {
          for (const auto& [dj, wj] : AxisOffsets(s, h_[t], rule_)) {
            entry.taps.push_back({di, dj, wi * wj});
            merged[{grid_.Wrap(di), grid_.Wrap(dj)}] += wi * wj;
          }
        }
        table_.push_back(std::move(entry));
      }
    }
    for (const auto& [offset, weight] : merged) {
      taps_[t].push_back({offset.first, offset.second, weight});
    }
  }
}

Signal ShiftGenerators::Apply(int t, const Signal& phi) const {
  RequireSameGrid(grid_, phi.grid(), "shift generator");
  return ApplyTaps(grid_, taps_.at(t), phi);
}

Signal ShiftGenerators::Mix(const Eigen::VectorXd& w, const Signal& phi) const {
  RequireSameGrid(grid_, phi.grid(), "shift mixture");
  if (w.size() != m()) {
    throw std::invalid_argument("weight vector length differs from m");
  }
  const double scale = 1.0 / (4.0 * std::sqrt(static_cast<double>(m())));
  std::vector<ShiftTap> taps;
  for (int t = 0; t < m(); ++t) {
    for (const ShiftTap& tap : taps_[t]) {
      taps.push_back({tap.di, tap.dj, tap.weight * w[t] * scale});
    }
  }
  return ApplyTaps(grid_, taps, phi);
}

ShiftMixtureGeneo::ShiftMixtureGeneo(ShiftGenerators generators,
                                     Eigen::VectorXd u, bool renormalized)
    : generators_(std::move(generators)),
      u_(std::move(u)),
      renormalized_(renormalized) {}

Operator ShiftMixtureGeneo::AsOperator() const {
  std::string name = "F(u=";
  char buf[32];
  for (int t = 0; t < m(); ++t) {
    std::snprintf(buf, sizeof(buf), t == 0 ? "%.6g" : ",%.6g", u_[t]);
    name += buf;
  }
  name += ")";
  ShiftMixtureGeneo self = *this;
  return Operator(std::move(name), grid(), grid(),
                  [self](const Signal& phi) { return self.Apply(phi); });
}

ShiftMixtureGeneo MakeShiftMixture(const ShiftGenerators& generators,
                                   Eigen::VectorXd u) {
  if (u.size() != generators.m()) {
    throw std::invalid_argument("u has length " + std::to_string(u.size()) +
                                ", expected m=" +
                                std::to_string(generators.m()));
  }
  if (!u.allFinite()) throw std::invalid_argument("u must be finite");
  const double norm = u.norm();
  if (norm == 0.0) throw std::invalid_argument("u must be nonzero");
  const bool renormalized = std::abs(norm - 1.0) > kUnitTolerance;
  u /= norm;
  return ShiftMixtureGeneo(generators, std::move(u), renormalized);
}

ShiftMixtureGeneo MakeShiftMixture(const TorusGrid& grid, Eigen::VectorXd u,
                                   std::vector<int> k, std::vector<int> h,
                                   BoundaryRule rule) {
  return MakeShiftMixture(
      ShiftGenerators(grid, std::move(k), std::move(h), rule), std::move(u));
}

Operator ShiftMixtureWithWeights(const ShiftGenerators& generators,
                                 Eigen::VectorXd w) {
  if (w.size() != generators.m()) {
    throw std::invalid_argument("weight vector length differs from m");
  }
  return Operator("shift-mixture(weights)", generators.grid(),
                  generators.grid(), [generators, w](const Signal& phi) {
                    return generators.Mix(w, phi);
                  });
}

nlohmann::json ToJson(const ShiftMixtureGeneo& f) {
  std::vector<double> u(f.u().data(), f.u().data() + f.u().size());
  return {{"n", f.grid().n()},
          {"m", f.m()},
          {"u", u},
          {"k", f.generators().k()},
          {"h", f.generators().h()},
          {"boundary", ToString(f.generators().rule())}};
}

ShiftMixtureGeneo ShiftMixtureFromJson(const nlohmann::json& j) {
  const auto u = j.at("u").get<std::vector<double>>();
  const int m = j.at("m").get<int>();
  if (static_cast<int>(u.size()) != m) {
    throw std::invalid_argument("u length does not match m");
  }
  const BoundaryRule rule =
      ParseBoundaryRule(j.value("boundary", std::string("midpoint")));
  return MakeShiftMixture(TorusGrid(j.at("n").get<int>()),
                          Eigen::Map<const Eigen::VectorXd>(u.data(), m),
                          j.at("k").get<std::vector<int>>(),
                          j.at("h").get<std::vector<int>>(), rule);
}

NonexpansiveReport CheckNonexpansive(const Operator& f,
                                     const WeightedSignalSpace& space,
                                     int trials, double tol,
                                     std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  Rng rng(seed);
  NonexpansiveReport report;
  const auto& support = space.signals();
  for (int trial = 0; trial < trials; ++trial) {
    Signal a = Signal::Zero(f.domain());
    Signal b = a;
    if (trial % 3 == 0 && support.size() >= 2) {
      const std::size_t i = rng.Below(support.size());
      std::size_t j = rng.Below(support.size() - 1);
      if (j >= i) ++j;
      a = support[i];
      b = support[j];
    } else if (trial % 3 == 1) {
      a = RandomSignal(f.domain(), rng);
      b = RandomSignal(f.domain(), rng);
    } else {
      // Constant offsets: the direction in which shift mixtures stretch most.
      a = RandomSignal(f.domain(), rng);
      b = a + Signal::Constant(f.domain(), rng.Uniform(-1.0, 1.0));
    }
    const double input_gap = NormV(a - b);
    if (input_gap == 0.0) continue;
    const double ratio = NormV(f(a) - f(b)) / input_gap;
    ++report.pairs;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (ratio > 1.0 + tol) ++report.violations;
  }
  report.ok = report.violations == 0;
  return report;
}

EquivarianceReport CheckEquivariance(const Operator& f,
                                     const std::vector<GridIsometry>& group,
                                     const std::vector<Signal>& signals,
                                     const Homomorphism& T, double tol) {
  EquivarianceReport report;
  for (const Signal& phi : signals) {
    const Signal image = f(phi);
    for (const GridIsometry& g : group) {
      const double defect = NormInf(f(Act(phi, g)) - Act(image, T(g)));
      ++report.checks;
      if (defect > report.max_defect || report.worst_element.empty()) {
        report.max_defect = std::max(report.max_defect, defect);
        report.worst_element = g.Label();
      }
    }
  }
  report.ok = report.max_defect <= tol;
  return report;
}

double OpInner(const Operator& f1, const Operator& f2,
               const OperatorContext& ctx) {
  const auto& space = ctx.domain;
  std::vector<double> terms(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    const Signal& phi = space.signals()[s];
    terms[s] = space.weights()[s] * InnerProduct(f1(phi), f2(phi));
  }
  return SymmetricSum(std::move(terms));
}

double OpNormInf(const Operator& f, const OperatorContext& ctx) {
  double best = 0.0;
  for (const Signal& phi : ctx.domain.signals()) {
    best = std::max(best, NormInf(f(phi)));
  }
  return best;
}

double OpNormV2(const Operator& f, const OperatorContext& ctx) {
  double best = 0.0;
  for (const Signal& phi : ctx.domain.signals()) {
    best = std::max(best, NormV(f(phi)));
  }
  return best;
}

double OpNormL2(const Operator& f, const OperatorContext& ctx) {
  return std::sqrt(std::max(0.0, OpInner(f, f, ctx)));
}

GramMatrix::GramMatrix(Eigen::MatrixXd q) : q_(std::move(q)) {
  if (q_.rows() != q_.cols() || q_.rows() == 0) {
    throw std::invalid_argument("Gram matrix must be square and nonempty");
  }
}

double GramMatrix::MinEigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q_,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool GramMatrix::IsPsd() const {
  if (!q_.isApprox(q_.transpose(), 1e-12)) return false;
  return MinEigenvalue() >= -1e-9 * std::abs(trace());
}

GramMatrix ComputeGramMatrix(const ShiftGenerators& generators,
                             const WeightedSignalSpace& space) {
  RequireSameGrid(generators.grid(), space.grid(), "Gram matrix");
  const int m = generators.m();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t s = 0; s < space.size(); ++s) {
    std::vector<Signal> images;
    images.reserve(m);
    for (int t = 0; t < m; ++t) {
      images.push_back(generators.Apply(t, space.signals()[s]));
    }
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        q(a, b) += space.weights()[s] * InnerProduct(images[a], images[b]);
      }
    }
  }
  q /= 16.0 * m;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < a; ++b) q(a, b) = q(b, a);
  }
  return GramMatrix(std::move(q));
}

std::string GramToCsv(const GramMatrix& q) {
  std::string out;
  char buf[32];
  for (int a = 0; a < q.m(); ++a) {
    for (int b = 0; b < q.m(); ++b) {
      std::snprintf(buf, sizeof(buf), b == 0 ? "%.17g" : ",%.17g",
                    q.matrix()(a, b));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace geneo
