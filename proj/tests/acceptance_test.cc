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

// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// worst case and wall-clock time. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "geneo/errors.h"
#include "geneo/experiment.h"
#include "geneo/group.h"
#include "geneo/ingest.h"
#include "geneo/metrics.h"
#include "geneo/operator.h"
#include "geneo/rng.h"
#include "geneo/select.h"

namespace geneo {
namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void Criterion(const std::string& name, double budget_seconds,
               const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = seconds < budget_seconds;
  const bool ok = v.passed && in_time;
  if (!ok) ++failures;
  std::printf("%s  %-22s %7.2fs (limit %.0fs)  %s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              seconds, budget_seconds, v.detail.c_str(), in_time ? "" : " [over time]");
  std::fflush(stdout);
}

std::string Fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

Signal RandomSignal(const TorusGrid& grid, Rng& rng) {
  std::vector<double> v(grid.site_count());
  for (double& x : v) x = rng.Uniform(-1.0, 1.0);
  return Signal(grid, std::move(v));
}

std::vector<int> Iota(int m) {
  std::vector<int> out(m);
  for (int t = 0; t < m; ++t) out[t] = t + 1;
  return out;
}

WeightedSignalSpace UniformSpace(std::vector<Signal> signals) {
  std::vector<double> weights(signals.size(), 1.0);
  return WeightedSignalSpace(std::move(signals), std::move(weights));
}

Verdict NonExpansiveness() {
  Rng rng(101);
  const TorusGrid grid(28);
  const std::vector<Signal> glyphs = SynthGlyphs(28, 7);
  double worst = 0.0;
  int pairs = 0;
  for (int m : {1, 2, 8}) {
    const ShiftGenerators gens(grid, Iota(m), Iota(m), BoundaryRule::kMidpoint);
    for (int trial = 0; trial < 1000; ++trial) {
      const ShiftMixtureGeneo f = MakeShiftMixture(gens, SampleSphere(m, rng));
      Signal a = RandomSignal(grid, rng);
      Signal b = RandomSignal(grid, rng);
      if (trial % 3 == 1) {
        a = glyphs[rng.Below(26)];
        b = glyphs[rng.Below(26)];
      } else if (trial % 3 == 2) {
        b = a + Signal::Constant(grid, rng.Uniform(-1.0, 1.0));
      }
      const double gap = NormV(a - b);
      if (gap == 0.0) continue;
      worst = std::max(worst, NormV(f.Apply(a) - f.Apply(b)) / gap);
      ++pairs;
    }
  }
  return {worst <= 1.0 + 1e-12,
          "max ratio " + Fmt("%.17g", worst) + " over " + std::to_string(pairs) + " pairs"};
}

Verdict Equivariance() {
  Rng rng(102);
  const TorusGrid grid(8);
  const std::vector<GridIsometry> group = TranslationsAndReflections(grid);
  double worst = 0.0;
  int checks = 0;
  for (int m : {1, 2, 8}) {
    const ShiftGenerators gens(grid, Iota(m), Iota(m), BoundaryRule::kMidpoint);
    for (int trial = 0; trial < 5; ++trial) {
      const ShiftMixtureGeneo f = MakeShiftMixture(gens, SampleSphere(m, rng));
      const EquivarianceReport r =
          CheckEquivariance(f.AsOperator(), group, {RandomSignal(grid, rng)},
                            IdentityHomomorphism(), 1e-12);
      worst = std::max(worst, r.max_defect);
      checks += r.checks;
    }
  }
  return {worst <= 1e-12, "max defect " + Fmt("%.3g", worst) + " over " +
                              std::to_string(checks) + " (F, phi, g) checks, " +
                              std::to_string(group.size()) + " elements"};
}

Verdict GramIdentity() {
  Rng rng(103);
  const WeightedSignalSpace space = UniformSpace(SynthGlyphs(28, 7));
  const ShiftGenerators gens(space.grid(), {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const GramMatrix q = ComputeGramMatrix(gens, space);
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const Eigen::VectorXd u1 = SampleSphere(2, rng), u2 = SampleSphere(2, rng);
    const double direct = std::pow(OpNormL2(Difference(MakeShiftMixture(gens, u1).AsOperator(),
                                                       MakeShiftMixture(gens, u2).AsOperator()),
                                            ctx),
                                   2);
    worst = std::max(worst, std::abs(q.Distance2(u1, u2) - direct) / direct);
  }
  return {worst <= 1e-10, "max relative error " + Fmt("%.3g", worst) + " over 20 pairs, N=26"};
}

Verdict GradientCheck() {
  Rng rng(104);
  const WeightedSignalSpace space = UniformSpace(SynthGlyphs(28, 7));
  const ShiftGenerators gens(space.grid(), {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const GramMatrix q = ComputeGramMatrix(gens, space);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Configuration cfg = RandomConfiguration(10, 2, rng, q);
    const auto grad = EnergyGradient(cfg, q);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < cfg.r(); ++i) {
      for (int c = 0; c < cfg.m(); ++c) {
        Configuration plus = cfg, minus = cfg;
        plus.points[i][c] += h;
        minus.points[i][c] -= h;
        const double fd = (Energy(plus, q) - Energy(minus, q)) / (2 * h);
        err = std::max(err, std::abs(fd - grad[i][c]));
        scale = std::max(scale, std::abs(grad[i][c]));
      }
    }
    worst = std::max(worst, err / scale);
  }
  return {worst < 1e-5, "max relative error " + Fmt("%.3g", worst) + " over 20 configurations"};
}

std::vector<SelectionResult> sanity_runs;

Verdict OptimizerSanity() {
  const GramMatrix q = GramMatrix::Identity(2);
  double worst_two = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    sanity_runs.push_back(Optimize(RandomConfiguration(2, 2, rng, q), q));
    worst_two = std::max(worst_two, std::abs(sanity_runs.back().energy_trace.back() - 0.25));
  }
  const double target = Energy(EquallySpacedCircle(10), q);
  Rng rng(11);
  sanity_runs.push_back(Optimize(RandomConfiguration(10, 2, rng, q), q));
  const double rel = std::abs(sanity_runs.back().energy_trace.back() - target) / target;
  return {worst_two <= 1e-6 && rel <= 1e-3,
          "r=2 max |E-1/4| " + Fmt("%.3g", worst_two) + "; r=10 rel. gap " + Fmt("%.3g", rel) +
              " to equally spaced E=" + Fmt("%.6f", target)};
}

struct EtaRun {
  std::string label;
  ExperimentReport report;
};
std::vector<EtaRun> eta_runs;

Verdict EtaExperiment() {
  ExperimentConfig config;
  std::vector<std::pair<std::string, DatasetSpec>> datasets;
  datasets.push_back({"synthetic/uniform", DatasetSpec{}});
  std::string emnist_note = "; EMNIST not found (set GENEO_DATA_DIR), synthetic only";
  if (const char* dir = std::getenv("GENEO_DATA_DIR")) {
    if (std::optional<DatasetSpec> spec = FindEmnist(dir)) {
      spec->frequency_path = GENEO_SOURCE_DIR "/data/letter_frequencies.txt";
      datasets.push_back({"emnist/frequencies", *spec});
      emnist_note = "";
    }
  }
  bool ok = true;
  std::string detail;
  for (const auto& [label, spec] : datasets) {
    const LoadedDataset data = LoadDataset(spec, config.n);
    eta_runs.push_back({label, RunExperiment(data, config)});
    const ExperimentReport& report = eta_runs.back().report;
    for (const RSummary& s : report.summaries) {
      int below = 0;
      for (const RunRecord& run : report.runs) below += run.r == s.r && run.mean_eta < 1.0;
      const bool r_ok = below == static_cast<int>(config.seeds.size()) &&
                        s.grand_mean_eta > 0.2 && s.grand_mean_eta < 0.95;
      ok = ok && r_ok;
      detail += label + " r=" + std::to_string(s.r) + ": grand mean " +
                Fmt("%.4g", s.grand_mean_eta) + ", seeds below 1: " + std::to_string(below) +
                "/" + std::to_string(config.seeds.size()) + "; ";
    }
  }
  return {ok, detail + "reference 0.5833 (r=10), 0.5442 (r=20)" + emnist_note};
}

void LogEtaDetails() {
  for (const EtaRun& e : eta_runs) {
    for (const RunRecord& run : e.report.runs) {
      std::printf("      %s r=%d seed=%llu mean=%.4g median=%.4g ratio_of_means=%.4g %s\n",
                  e.label.c_str(), run.r, static_cast<unsigned long long>(run.seed),
                  run.mean_eta, run.median_eta, run.ratio_of_means,
                  ToString(run.result.termination).c_str());
    }
    for (const RSummary& s : e.report.summaries) {
      std::printf("      %s r=%d grand mean=%.4g mean median=%.4g mean ratio_of_means=%.4g\n",
                  e.label.c_str(), s.r, s.grand_mean_eta, s.mean_median_eta,
                  s.mean_ratio_of_means);
    }
  }
}

Verdict StoppingContract() {
  int runs = 0, tol_met = 0, capped = 0;
  std::string bad;
  auto check = [&](const SelectionResult& r) {
    ++runs;
    bool ok = false;
    if (r.termination == Termination::kToleranceMet) {
      ok = r.grad_norm < 1e-6;
      ++tol_met;
    } else if (r.termination == Termination::kMaxEvals) {
      ok = r.evals == 3000;
      ++capped;
    }
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
      ok = ok && r.energy_trace[i] <= r.energy_trace[i - 1];
    }
    if (!ok && bad.empty()) bad = " first violation: " + ToString(r.termination);
  };
  for (const SelectionResult& r : sanity_runs) check(r);
  for (const EtaRun& e : eta_runs) {
    for (const RunRecord& run : e.report.runs) check(run.result);
  }
  return {bad.empty() && runs > 0, std::to_string(runs) + " runs: " + std::to_string(tol_met) +
                                       " tolerance_met, " + std::to_string(capped) +
                                       " at the 3000-evaluation cap" + bad};
}

Verdict PseudoMetricSuite() {
  bool ok = true;
  double worst_triangle = 0.0, worst_bi = 0.0, worst_order = -1e300;
  std::size_t elements = 0;
  for (int n : {2, 3}) {
    const WeightedSignalSpace base = UniformSpace(RandomSignals(n, 5, 200 + n));
    const std::vector<GridIsometry> group = EnumerateGroup(base.grid());
    elements += group.size();
    // Left invariance needs a G-invariant support; right invariance does not.
    const WeightedSignalSpace space = OrbitClosure(base, group);
    const double beta = GetEquivalenceConstants(space.grid()).beta;
    for (const WeightedSignalSpace* s : {&base, &space}) {
      const PseudoMetricTable dx = DeltaXTable(*s), dmx = DMaxXTable(*s);
      const PseudoMetricTable dg = DeltaGTable(*s, group), dmg = DMaxGTable(*s, group);
      for (const PseudoMetricTable* t : {&dx, &dmx, &dg, &dmg}) {
        const PseudoMetricReport r = CheckPseudometric(*t, 1e-9);
        ok = ok && r.ok;
        worst_triangle = std::max(worst_triangle, r.worst_triangle);
      }
      for (std::size_t i = 0; i < dx.data().size(); ++i) {
        worst_order = std::max(worst_order, dx.data()[i] - dmx.data()[i]);
      }
      for (std::size_t i = 0; i < dg.data().size(); ++i) {
        worst_order = std::max(worst_order, dg.data()[i] - beta * dmg.data()[i]);
      }
    }
    std::map<std::vector<int>, std::size_t> where;
    for (std::size_t e = 0; e < group.size(); ++e) where[group[e].perm()] = e;
    const PseudoMetricTable dg = DeltaGTable(space, group);
    const PseudoMetricTable right = DeltaGTable(base, group);
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = 0; b < group.size(); ++b) {
        for (std::size_t c = 0; c < group.size(); ++c) {
          const std::size_t ac = where.at(Compose(group[a], group[c]).perm());
          const std::size_t bc = where.at(Compose(group[b], group[c]).perm());
          const std::size_t ca = where.at(Compose(group[c], group[a]).perm());
          const std::size_t cb = where.at(Compose(group[c], group[b]).perm());
          worst_bi = std::max({worst_bi, std::abs(dg.at(a, b) - dg.at(ac, bc)),
                               std::abs(dg.at(a, b) - dg.at(ca, cb)),
                               std::abs(right.at(a, b) - right.at(ac, bc))});
        }
      }
    }
  }
  ok = ok && worst_order <= 0.0 && worst_bi == 0.0;
  return {ok, "worst triangle excess " + Fmt("%.3g", worst_triangle) +
                  ", max(delta - bound) " + Fmt("%.3g", worst_order) +
                  ", bi-invariance defect " + Fmt("%.3g", worst_bi) + " over " +
                  std::to_string(elements) + " group elements"};
}

Verdict Convexity() {
  Rng rng(105);
  const WeightedSignalSpace space = UniformSpace(SynthGlyphs(8, 7));
  const TorusGrid& grid = space.grid();
  const ShiftGenerators gens(grid, {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const std::vector<GridIsometry> group = TranslationsAndReflections(grid);
  double worst_ratio = 0.0, worst_defect = 0.0;
  int combos = 0;
  for (int pair = 0; pair < 50; ++pair) {
    const Operator f1 = MakeShiftMixture(gens, SampleSphere(2, rng)).AsOperator();
    const Operator f2 = MakeShiftMixture(gens, SampleSphere(2, rng)).AsOperator();
    const std::vector<Signal> probes = {space.signals()[rng.Below(26)], RandomSignal(grid, rng)};
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      const Operator ft = ConvexCombo(f1, f2, t);
      worst_ratio = std::max(
          worst_ratio, CheckNonexpansive(ft, space, 30, 1e-12, 1000 + pair).max_ratio);
      worst_defect = std::max(
          worst_defect,
          CheckEquivariance(ft, group, probes, IdentityHomomorphism(), 1e-12).max_defect);
      ++combos;
    }
  }
  return {worst_ratio <= 1.0 + 1e-12 && worst_defect <= 1e-12,
          std::to_string(combos) + " combinations: max ratio " + Fmt("%.17g", worst_ratio) +
              ", max equivariance defect " + Fmt("%.3g", worst_defect)};
}

Verdict FiniteApproximation() {
  Rng rng(106);
  const WeightedSignalSpace space = UniformSpace(SynthGlyphs(28, 7));
  const ShiftGenerators gens(space.grid(), {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const GramMatrix q = ComputeGramMatrix(gens, space);
  std::vector<Eigen::VectorXd> u;
  std::vector<std::string> labels;
  for (int s = 0; s < 500; ++s) {
    u.push_back(SampleSphere(2, rng));
    labels.push_back("u" + std::to_string(s));
  }
  const PseudoMetricTable table = BuildTable(labels, [&](std::size_t a, std::size_t b) {
    return std::sqrt(std::max(0.0, q.Distance2(u[a], u[b])));
  });
  // Spot-check table entries against the operator norm computed directly.
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  double spot = 0.0;
  for (int i = 0; i < 5; ++i) {
    const std::size_t a = rng.Below(500), b = rng.Below(500);
    const double direct = OpNormL2(Difference(MakeShiftMixture(gens, u[a]).AsOperator(),
                                              MakeShiftMixture(gens, u[b]).AsOperator()),
                                   ctx);
    spot = std::max(spot, std::abs(direct - table.at(a, b)) / std::max(direct, 1e-300));
  }
  bool ok = spot <= 1e-8;
  std::string detail = "diameter " + Fmt("%.4g", table.Diameter()) + ", sizes";
  std::size_t previous = SIZE_MAX;
  for (double f : {0.05, 0.1, 0.2, 0.4}) {
    const double eps = f * table.Diameter();
    const EpsilonNet net = GreedyEpsilonNet(table, eps);
    double radius = 0.0;
    for (std::size_t b = 0; b < table.size(); ++b) {
      double nearest = INFINITY;
      for (std::size_t p : net.indices) nearest = std::min(nearest, table.at(p, b));
      radius = std::max(radius, nearest);
    }
    ok = ok && radius <= eps && net.indices.size() < previous;
    previous = net.indices.size();
    detail += " " + std::to_string(net.indices.size());
  }
  return {ok, detail + " at eps = {0.05,0.1,0.2,0.4} x diameter; spot-check error " +
                  Fmt("%.3g", spot)};
}

}  // namespace
}  // namespace geneo

int main() {
  using namespace geneo;
  std::printf("%s acceptance suite\n", kVersionTag);
  const auto start = Clock::now();
  Criterion("non-expansiveness", 10, NonExpansiveness);
  Criterion("equivariance", 10, Equivariance);
  Criterion("gram-identity", 5, GramIdentity);
  Criterion("gradient-check", 5, GradientCheck);
  Criterion("optimizer-sanity", 30, OptimizerSanity);
  Criterion("eta-experiment", 180, EtaExperiment);
  LogEtaDetails();
  Criterion("stopping-contract", 1, StoppingContract);
  Criterion("pseudo-metric-suite", 30, PseudoMetricSuite);
  Criterion("convexity", 20, Convexity);
  Criterion("finite-approximation", 20, FiniteApproximation);
  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  Criterion("total-wall-clock", 300, [&] {
    return Verdict{total < 300, Fmt("%.2fs for the suite", total)};
  });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
