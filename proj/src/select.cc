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

#include "geneo/select.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "geneo/errors.h"

namespace geneo {

double Configuration::MaxUnitDefect() const {
  double worst = 0.0;
  for (const auto& u : points) worst = std::max(worst, std::abs(u.norm() - 1.0));
  return worst;
}

double CollisionGuard(const GramMatrix& q) { return 1e-12 * q.trace(); }

double Energy(const Configuration& cfg, const GramMatrix& q) {
  const double guard = CollisionGuard(q);
  double total = 0.0;
  for (int i = 0; i < cfg.r(); ++i) {
    for (int j = i + 1; j < cfg.r(); ++j) {
      const double d = q.Distance2(cfg.points[i], cfg.points[j]);
      if (!(d > guard)) {
        throw CollisionError("points " + std::to_string(i) + " and " +
                             std::to_string(j) + " collide (distance " +
                             std::to_string(d) + ")");
      }
      total += 1.0 / d;
    }
  }
  return total;
}

std::vector<Eigen::VectorXd> EnergyGradient(const Configuration& cfg,
                                            const GramMatrix& q) {
  const double guard = CollisionGuard(q);
  std::vector<Eigen::VectorXd> grad(cfg.r(), Eigen::VectorXd::Zero(cfg.m()));
  for (int i = 0; i < cfg.r(); ++i) {
    for (int j = i + 1; j < cfg.r(); ++j) {
      const Eigen::VectorXd diff = cfg.points[i] - cfg.points[j];
      const Eigen::VectorXd q_diff = q.matrix() * diff;
      const double d = diff.dot(q_diff);
      if (!(d > guard)) {
        throw CollisionError("points " + std::to_string(i) + " and " +
                             std::to_string(j) + " collide");
      }
      const Eigen::VectorXd term = (-2.0 / (d * d)) * q_diff;
      grad[i] += term;
      grad[j] -= term;
    }
  }
  return grad;
}

std::vector<Eigen::VectorXd> RiemannianGradient(
    const Configuration& cfg, const std::vector<Eigen::VectorXd>& euclid_grad) {
  if (euclid_grad.size() != cfg.points.size()) {
    throw std::invalid_argument("gradient and configuration sizes differ");
  }
  std::vector<Eigen::VectorXd> out(euclid_grad.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::VectorXd& u = cfg.points[i];
    out[i] = euclid_grad[i] - euclid_grad[i].dot(u) * u;
  }
  return out;
}

Eigen::VectorXd Retract(const Eigen::VectorXd& u, const Eigen::VectorXd& step) {
  Eigen::VectorXd v = step;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Eigen::VectorXd moved = u + v;
    const double norm = moved.norm();
    if (norm > 0.0 && std::isfinite(norm)) return moved / norm;
    v *= 0.5;
  }
  return u;
}

std::string ToString(Termination termination) {
  switch (termination) {
    case Termination::kToleranceMet:
      return "tolerance_met";
    case Termination::kMaxEvals:
      return "max_evals";
    case Termination::kStalled:
      return "stalled";
  }
  return "unknown";
}

SelectionResult Optimize(const Configuration& start, const GramMatrix& q,
                         const OptimizerOptions& options) {
  if (options.max_evals < 1) {
    throw std::invalid_argument("max_evals must be at least 1");
  }
  SelectionResult result;
  Configuration x = start;
  double energy = Energy(x, q);
  result.evals = 1;
  result.energy_trace.push_back(energy);

  auto max_norm = [](const std::vector<Eigen::VectorXd>& g) {
    double worst = 0.0;
    for (const auto& gi : g) worst = std::max(worst, gi.norm());
    return worst;
  };

  while (true) {
    const auto grad = RiemannianGradient(x, EnergyGradient(x, q));
    result.grad_norm = max_norm(grad);
    if (result.grad_norm < options.tol) {
      result.termination = Termination::kToleranceMet;
      break;
    }
    double slope = 0.0;
    for (const auto& gi : grad) slope += gi.squaredNorm();

    double step = options.initial_step;
    bool accepted = false;
    bool budget_spent = false;
    while (step >= options.min_step) {
      if (result.evals >= options.max_evals) {
        budget_spent = true;
        break;
      }
      Configuration trial = x;
      for (int i = 0; i < x.r(); ++i) {
        trial.points[i] = Retract(x.points[i], -step * grad[i]);
      }
      ++result.evals;
      double trial_energy;
      try {
        trial_energy = Energy(trial, q);
      } catch (const CollisionError&) {
        step *= options.shrink;
        continue;
      }
      if (trial_energy <= energy - options.sufficient_decrease * step * slope) {
        x = std::move(trial);
        energy = trial_energy;
        accepted = true;
        break;
      }
      step *= options.shrink;
    }
    if (accepted) {
      ++result.iterations;
      result.energy_trace.push_back(energy);
      continue;
    }
    result.termination =
        budget_spent ? Termination::kMaxEvals : Termination::kStalled;
    break;
  }
  result.final = std::move(x);
  return result;
}

Eigen::VectorXd SampleSphere(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sphere dimension m must be >= 1");
  Eigen::VectorXd v(m);
  double norm = 0.0;
  do {
    for (int t = 0; t < m; ++t) v[t] = rng.Normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Configuration RandomConfiguration(int r, int m, Rng& rng, const GramMatrix& q) {
  if (r < 1) throw std::invalid_argument("r must be at least 1");
  if (q.m() != m) throw std::invalid_argument("Gram matrix size differs from m");
  const double guard = CollisionGuard(q);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Configuration cfg;
    for (int i = 0; i < r; ++i) cfg.points.push_back(SampleSphere(m, rng));
    bool clear = true;
    for (int i = 0; i < r && clear; ++i) {
      for (int j = i + 1; j < r && clear; ++j) {
        clear = q.Distance2(cfg.points[i], cfg.points[j]) > guard;
      }
    }
    if (clear) return cfg;
  }
  throw CollisionError("could not draw " + std::to_string(r) +
                       " separated points in 100 attempts");
}

NearestDistances Nearest(const Eigen::VectorXd& u,
                         const Configuration& optimized,
                         const Configuration& baseline, const GramMatrix& q) {
  if (optimized.points.empty() || baseline.points.empty()) {
    throw std::invalid_argument("eta needs nonempty configurations");
  }
  auto nearest = [&](const Configuration& cfg) {
    double best = q.Distance2(u, cfg.points[0]);
    for (const auto& p : cfg.points) best = std::min(best, q.Distance2(u, p));
    return best;
  };
  return {nearest(optimized), nearest(baseline)};
}

double Eta(const Eigen::VectorXd& u, const Configuration& optimized,
           const Configuration& baseline, const GramMatrix& q) {
  const NearestDistances d = Nearest(u, optimized, baseline, q);
  if (!(d.baseline > CollisionGuard(q))) {
    throw CollisionError("evaluation operator coincides with a baseline point");
  }
  return d.optimized / d.baseline;
}

Configuration EquallySpacedCircle(int r) {
  Configuration cfg;
  for (int i = 0; i < r; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / r;
    Eigen::VectorXd p(2);
    p << std::cos(angle), std::sin(angle);
    cfg.points.push_back(p);
  }
  return cfg;
}

}  // namespace geneo
