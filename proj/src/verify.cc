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

#include "geneo/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "geneo/group.h"
#include "geneo/ingest.h"
#include "geneo/metrics.h"
#include "geneo/rng.h"
#include "geneo/select.h"

namespace geneo {
namespace {

constexpr double kExactTol = 1e-12;

std::string Fmt(const char* format, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

PropertyResult Result(std::string name, bool passed, double worst,
                      std::string detail = "") {
  return {std::move(name), passed, false, worst, std::move(detail)};
}

std::vector<Signal> ProbeSignals(const WeightedSignalSpace& space, Rng& rng) {
  std::vector<Signal> out;
  for (std::size_t s = 0; s < std::min<std::size_t>(3, space.size()); ++s) {
    out.push_back(space.signals()[s]);
  }
  for (int extra = 0; extra < 2; ++extra) {
    std::vector<double> values(space.grid().site_count());
    for (double& v : values) v = rng.Uniform(-1.0, 1.0);
    out.emplace_back(space.grid(), std::move(values));
  }
  return out;
}

// A subset of sites small enough for the cubic triangle check.
std::vector<int> SiteSample(const TorusGrid& grid, Rng& rng) {
  std::vector<int> sites(grid.site_count());
  for (int s = 0; s < grid.site_count(); ++s) sites[s] = s;
  if (sites.size() <= 144) return sites;
  for (std::size_t i = sites.size() - 1; i > 0; --i) {
    std::swap(sites[i], sites[rng.Below(i + 1)]);
  }
  sites.resize(64);
  std::sort(sites.begin(), sites.end());
  return sites;
}

std::vector<GridIsometry> GroupSample(const TorusGrid& grid, Rng& rng,
                                      std::size_t count) {
  std::vector<GridIsometry> out = {GridIsometry::Identity(grid)};
  while (out.size() < count) {
    out.push_back(GridIsometry::FromDescriptor(
        grid, {static_cast<int>(rng.Below(grid.n())),
               static_cast<int>(rng.Below(grid.n())), rng.Below(2) == 1,
               rng.Below(2) == 1, rng.Below(2) == 1}));
  }
  return out;
}

void AppendMetricChecks(const WeightedSignalSpace& space,
                        const std::vector<GridIsometry>& elements, Rng& rng,
                        std::vector<PropertyResult>& out) {
  const TorusGrid& grid = space.grid();
  const std::vector<int> sites = SiteSample(grid, rng);
  std::vector<std::string> labels;
  for (int s : sites) labels.push_back(SiteLabel(grid, s));
  const PseudoMetricTable dx = BuildTable(labels, [&](std::size_t a, std::size_t b) {
    return DeltaX(space, sites[a], sites[b]);
  });
  const PseudoMetricTable dmx = BuildTable(labels, [&](std::size_t a, std::size_t b) {
    return DMaxX(space, sites[a], sites[b]);
  });
  const PseudoMetricTable dg = DeltaGTable(space, elements);
  const PseudoMetricTable dmg = DMaxGTable(space, elements);

  for (const auto& [name, table] :
       {std::pair{"pseudometric/delta-x", &dx}, std::pair{"pseudometric/dmax-x", &dmx},
        std::pair{"pseudometric/delta-g", &dg}, std::pair{"pseudometric/dmax-g", &dmg}}) {
    const PseudoMetricReport report = CheckPseudometric(*table);
    out.push_back(Result(name, report.ok, std::max(report.worst_triangle, 0.0),
                         std::to_string(report.violation_count) + " violations over " +
                             std::to_string(table->size()) + " points"));
  }
  double worst_x = -1e300;
  for (std::size_t i = 0; i < dx.data().size(); ++i) {
    worst_x = std::max(worst_x, dx.data()[i] - dmx.data()[i]);
  }
  out.push_back(Result("delta-x<=dmax-x", worst_x <= 0.0, worst_x));
  const double beta = GetEquivalenceConstants(grid).beta;
  double worst_g = -1e300;
  for (std::size_t i = 0; i < dg.data().size(); ++i) {
    worst_g = std::max(worst_g, dg.data()[i] - beta * dmg.data()[i]);
  }
  out.push_back(Result("delta-g<=beta*dmax-g", worst_g <= 0.0, worst_g));

  // Right invariance holds for any support; it is a pure relabelling of sites.
  double worst_right = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto& g1 = elements[rng.Below(elements.size())];
    const auto& g2 = elements[rng.Below(elements.size())];
    const auto& g3 = elements[rng.Below(elements.size())];
    worst_right = std::max(
        worst_right, std::abs(DeltaG(space, g1, g2) -
                              DeltaG(space, Compose(g1, g3), Compose(g2, g3))));
  }
  out.push_back(Result("delta-g/right-invariance", worst_right == 0.0, worst_right));
}

void AppendFullGroupChecks(const WeightedSignalSpace& space,
                           std::vector<PropertyResult>& out) {
  const TorusGrid& grid = space.grid();
  const std::vector<GridIsometry> group = EnumerateGroup(grid);
  std::map<std::vector<int>, std::size_t> where;
  for (std::size_t e = 0; e < group.size(); ++e) where[group[e].perm()] = e;

  int identities = 0;
  bool closed = true;
  bool inverses = true;
  std::vector<std::vector<std::size_t>> product(group.size(),
                                                std::vector<std::size_t>(group.size()));
  for (std::size_t a = 0; a < group.size(); ++a) {
    identities += group[a].IsIdentity();
    inverses = inverses && where.count(Inverse(group[a]).perm()) == 1 &&
               Compose(group[a], Inverse(group[a])).IsIdentity();
    for (std::size_t b = 0; b < group.size(); ++b) {
      const auto it = where.find(Compose(group[a], group[b]).perm());
      if (it == where.end()) {
        closed = false;
      } else {
        product[a][b] = it->second;
      }
    }
  }
  bool associative = closed;
  for (std::size_t a = 0; a < group.size() && associative; ++a) {
    for (std::size_t b = 0; b < group.size() && associative; ++b) {
      for (std::size_t c = 0; c < group.size() && associative; ++c) {
        associative = product[product[a][b]][c] == product[a][product[b][c]];
      }
    }
  }
  out.push_back(Result("group/axioms", closed && inverses && associative && identities == 1,
                       0.0, std::to_string(group.size()) + " elements"));

  // Left invariance and the site isometry need a G-invariant support.
  const WeightedSignalSpace invariant = OrbitClosure(space, group);
  const PseudoMetricTable dg = DeltaGTable(invariant, group);
  double worst_bi = 0.0;
  double worst_inverse = 0.0;
  for (std::size_t a = 0; a < group.size(); ++a) {
    const std::size_t a_inv = where.at(Inverse(group[a]).perm());
    for (std::size_t b = 0; b < group.size(); ++b) {
      const std::size_t b_inv = where.at(Inverse(group[b]).perm());
      worst_inverse = std::max(worst_inverse, std::abs(dg.at(a, b) - dg.at(a_inv, b_inv)));
      for (std::size_t c = 0; c < group.size(); ++c) {
        worst_bi = std::max(worst_bi, std::abs(dg.at(a, b) - dg.at(product[a][c], product[b][c])));
        worst_bi = std::max(worst_bi, std::abs(dg.at(a, b) - dg.at(product[c][a], product[c][b])));
      }
    }
  }
  out.push_back(Result("delta-g/bi-invariance", worst_bi == 0.0, worst_bi,
                       "orbit-closed support of " + std::to_string(invariant.size()) +
                           " signals"));
  out.push_back(Result("delta-g/inverse-isometry", worst_inverse == 0.0, worst_inverse));
  const PseudoMetricReport axioms = CheckPseudometric(dg);
  out.push_back(Result("pseudometric/delta-g-full", axioms.ok,
                       std::max(axioms.worst_triangle, 0.0)));

  double worst_iso = 0.0;
  for (const GridIsometry& g : group) {
    for (int x1 = 0; x1 < grid.site_count(); ++x1) {
      for (int x2 = 0; x2 < grid.site_count(); ++x2) {
        worst_iso = std::max(worst_iso, std::abs(DeltaX(invariant, g(x1), g(x2)) -
                                                 DeltaX(invariant, x1, x2)));
      }
    }
  }
  out.push_back(Result("delta-x/isometry", worst_iso == 0.0, worst_iso));
}

}  // namespace

WeightedSignalSpace DefaultVerifySpace(int n, std::uint64_t seed) {
  std::vector<Signal> signals =
      n >= 8 ? SynthGlyphs(n, seed) : RandomSignals(n, 6, seed);
  std::vector<double> weights(signals.size(), 1.0);
  return MakeSpace(std::move(signals), std::move(weights));
}

std::vector<PropertyResult> RunVerification(const WeightedSignalSpace& space,
                                            const VerifyOptions& options) {
  std::vector<PropertyResult> out;
  Rng rng(options.seed);
  const TorusGrid& grid = space.grid();
  const ShiftGenerators generators(grid, options.k, options.h, options.boundary);
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  const std::vector<Signal> probes = ProbeSignals(space, rng);
  const std::vector<GridIsometry> symmetric = TranslationsAndReflections(grid);

  auto family_member = [&]() {
    return MakeShiftMixture(generators, SampleSphere(generators.m(), rng))
        .AsOperator()
        .Scaled(options.inject_scale);
  };
  // Equal weights reach ratio 1 on constant offsets.
  const Operator extremal =
      MakeShiftMixture(generators, Eigen::VectorXd::Constant(generators.m(), 1.0))
          .AsOperator()
          .Scaled(options.inject_scale);

  {
    NonexpansiveReport worst;
    for (int i = 0; i < 8; ++i) {
      const NonexpansiveReport r =
          CheckNonexpansive(i == 0 ? extremal : family_member(), space,
                            options.trials, kExactTol, options.seed + i);
      if (r.max_ratio >= worst.max_ratio) worst = r;
    }
    out.push_back(Result("nonexpansive", worst.ok, worst.max_ratio,
                         "max ratio " + Fmt("%.15g", worst.max_ratio)));
  }
  {
    double defect = 0.0;
    std::string element;
    for (int i = 0; i < 8; ++i) {
      const EquivarianceReport r = CheckEquivariance(
          family_member(), symmetric, probes, ctx.T, kExactTol);
      if (r.max_defect >= defect) {
        defect = r.max_defect;
        element = r.worst_element;
      }
    }
    out.push_back(Result("equivariance/translations+reflections",
                         defect <= kExactTol, defect, "worst at " + element));
  }
  {
    const EquivarianceReport r = CheckEquivariance(
        family_member(), {SwapAxes(grid)}, probes, ctx.T, kExactTol);
    PropertyResult swap = Result("equivariance/swap", true, r.max_defect,
                                 r.max_defect <= kExactTol
                                     ? "holds"
                                     : "defect expected when k != h");
    swap.informational = true;
    out.push_back(swap);
  }
  if (options.boundary == BoundaryRule::kMidpoint) {
    // Same family under the half-open convention, for comparison only.
    const ShiftGenerators half(grid, options.k, options.h, BoundaryRule::kHalfOpen);
    const EquivarianceReport r = CheckEquivariance(
        MakeShiftMixture(half, SampleSphere(half.m(), rng)).AsOperator(),
        {Reflection(grid, Axis::kX), Reflection(grid, Axis::kY)}, probes, ctx.T, kExactTol);
    PropertyResult info = Result("equivariance/reflection-half-open", true, r.max_defect,
                                 r.max_defect <= kExactTol ? "holds" : "defect from odd shifts");
    info.informational = true;
    out.push_back(info);
  }
  {
    bool ok = true;
    double worst_ratio = 0.0;
    double worst_defect = 0.0;
    for (int pair = 0; pair < 10; ++pair) {
      const Operator f1 = family_member();
      const Operator f2 = family_member();
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Operator ft = ConvexCombo(f1, f2, t);
        const NonexpansiveReport ne =
            CheckNonexpansive(ft, space, 20, kExactTol, options.seed + pair);
        const EquivarianceReport eq =
            CheckEquivariance(ft, symmetric, {probes.front()}, ctx.T, kExactTol);
        ok = ok && ne.ok && eq.ok;
        worst_ratio = std::max(worst_ratio, ne.max_ratio);
        worst_defect = std::max(worst_defect, eq.max_defect);
      }
    }
    out.push_back(Result("convexity", ok, worst_ratio,
                         "max ratio " + Fmt("%.15g", worst_ratio) +
                             ", max equivariance defect " + Fmt("%.3g", worst_defect)));
  }
  {
    const EquivalenceConstants c = GetEquivalenceConstants(grid);
    double worst = -1e300;
    for (int i = 0; i < 10; ++i) {
      const Operator f = Difference(family_member(), family_member());
      const double l2 = OpNormL2(f, ctx);
      const double v2 = OpNormV2(f, ctx);
      const double inf = OpNormInf(f, ctx);
      const double scale = std::max(v2, 1e-300);
      worst = std::max({worst, (l2 - v2) / scale, (c.alpha * inf - v2) / scale,
                        (v2 - c.beta * inf) / scale});
    }
    out.push_back(Result("norm-chain", worst <= kExactTol, worst));
  }
  {
    const GramMatrix q = ComputeGramMatrix(generators, space);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd u1 = SampleSphere(generators.m(), rng);
      const Eigen::VectorXd u2 = SampleSphere(generators.m(), rng);
      const double direct = std::pow(
          OpNormL2(Difference(MakeShiftMixture(generators, u1).AsOperator(),
                              MakeShiftMixture(generators, u2).AsOperator()),
                   ctx),
          2);
      const double reduced = q.Distance2(u1, u2);
      worst = std::max(worst, std::abs(reduced - direct) / std::max(direct, 1e-300));
    }
    out.push_back(Result("gram-identity", worst <= 1e-10, worst));
    out.push_back(Result("gram-psd", q.IsPsd(), q.MinEigenvalue()));
  }
  out.push_back(Result("homomorphism/identity",
                       HomomorphismDefect(ctx, GroupSample(grid, rng, 6)) == 0, 0.0));

  const std::vector<GridIsometry> elements =
      options.group_full ? EnumerateGroup(grid) : GroupSample(grid, rng, 12);
  AppendMetricChecks(space, elements, rng, out);
  if (options.group_full) AppendFullGroupChecks(space, out);
  return out;
}

bool AllPassed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.passed || r.informational; });
}

}  // namespace geneo
