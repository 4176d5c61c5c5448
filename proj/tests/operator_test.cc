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

#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

namespace geneo {
namespace {

Signal RandomSignal(const TorusGrid& grid, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(grid.site_count());
  for (double& x : v) x = dist(gen);
  return Signal(grid, v);
}

Eigen::VectorXd RandomUnit(int m, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd u(m);
  for (int i = 0; i < m; ++i) u[i] = normal(gen);
  return u / u.norm();
}

// phi sampled at half-pixel coordinates (x / 2, y / 2): whole-pixel reads on
// even coordinates, the mean of the two straddling pixels on odd ones.
double HalfPixel(const Signal& phi, int x, int y) {
  const int n = phi.grid().n();
  auto rows = [](int c) {
    return c % 2 == 0 ? std::vector<int>{c / 2}
                      : std::vector<int>{static_cast<int>(std::floor(c / 2.0)),
                                         static_cast<int>(std::floor(c / 2.0)) + 1};
  };
  const std::vector<int> is = rows(x), js = rows(y);
  double total = 0.0;
  for (int i : is) {
    for (int j : js) total += phi.at(((i % n) + n) % n, ((j % n) + n) % n);
  }
  return total / static_cast<double>(is.size() * js.size());
}

Signal NaiveMixture(const Signal& phi, const Eigen::VectorXd& u,
                    const std::vector<int>& k, const std::vector<int>& h) {
  const TorusGrid& grid = phi.grid();
  const int m = static_cast<int>(u.size());
  std::vector<double> out(grid.site_count(), 0.0);
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) {
      double v = 0.0;
      for (int t = 0; t < m; ++t) {
        for (int r : {-1, 1}) {
          for (int s : {-1, 1}) v += u[t] * HalfPixel(phi, 2 * i + r * k[t], 2 * j + s * h[t]);
        }
      }
      out[grid.Index(i, j)] = v / (4.0 * std::sqrt(m));
    }
  }
  return Signal(grid, out);
}

WeightedSignalSpace RandomSpace(int n, int count, unsigned seed) {
  TorusGrid grid(n);
  std::mt19937_64 gen(seed);
  std::vector<Signal> signals;
  std::vector<double> weights;
  for (int s = 0; s < count; ++s) {
    signals.push_back(RandomSignal(grid, gen));
    weights.push_back(1.0 + s);
  }
  return WeightedSignalSpace(signals, weights);
}

TEST(ShiftMixtureTest, ConstantIsFixed) {
  TorusGrid grid(5);
  const ShiftMixtureGeneo f =
      MakeShiftMixture(grid, Eigen::VectorXd::Ones(1), {2}, {2});
  const Signal c = Signal::Constant(grid, 0.375);
  EXPECT_EQ(f.Apply(c), c);
}

TEST(ShiftMixtureTest, HandTracedBasisImage) {
  TorusGrid grid(4);
  const ShiftMixtureGeneo f =
      MakeShiftMixture(grid, Eigen::VectorXd::Ones(1), {2}, {2});
  const Signal out = f.Apply(Signal::Basis(grid, 0, 0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool hit = (i == 1 || i == 3) && (j == 1 || j == 3);
      EXPECT_EQ(out.at(i, j), hit ? 0.25 : 0.0) << i << "," << j;
    }
  }
}

TEST(ShiftMixtureTest, MatchesNaiveHalfPixelEvaluation) {
  std::mt19937_64 gen(1);
  for (const auto& [k, h] : std::vector<std::pair<std::vector<int>, std::vector<int>>>{
           {{1}, {1}}, {{1, 2}, {1, 2}}, {{3, 1, 4}, {2, 5, 1}}, {{7}, {2}}}) {
    TorusGrid grid(6);
    const Eigen::VectorXd u = RandomUnit(static_cast<int>(k.size()), gen);
    const ShiftMixtureGeneo f = MakeShiftMixture(grid, u, k, h);
    const Signal phi = RandomSignal(grid, gen);
    const Signal expected = NaiveMixture(phi, u, k, h);
    const Signal got = f.Apply(phi);
    for (int s = 0; s < grid.site_count(); ++s) EXPECT_NEAR(got[s], expected[s], 1e-14);
  }
}

TEST(ShiftMixtureTest, LinearInSignalAndWeights) {
  TorusGrid grid(7);
  std::mt19937_64 gen(2);
  const ShiftGenerators gens(grid, {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const Signal a = RandomSignal(grid, gen);
  const Signal b = RandomSignal(grid, gen);
  const ShiftMixtureGeneo f = MakeShiftMixture(gens, RandomUnit(2, gen));
  const Signal sum = f.Apply(a + b) - (f.Apply(a) + f.Apply(b));
  EXPECT_LE(NormInf(sum), 1e-15);

  const Eigen::VectorXd u1 = RandomUnit(2, gen), u2 = RandomUnit(2, gen);
  const double t = 0.3;
  const Operator combo =
      ConvexCombo(MakeShiftMixture(gens, u1).AsOperator(), MakeShiftMixture(gens, u2).AsOperator(), t);
  const Operator direct = ShiftMixtureWithWeights(gens, (1 - t) * u1 + t * u2);
  EXPECT_LE(NormInf(combo(a) - direct(a)), 1e-15);
}

TEST(ShiftMixtureTest, ShiftTableFollowsRule) {
  TorusGrid grid(8);
  const ShiftGenerators half(grid, {1, 2}, {3, 4}, BoundaryRule::kHalfOpen);
  for (const ShiftTableEntry& e : half.shift_table()) {
    const int a = half.k()[e.t], b = half.h()[e.t];
    ASSERT_EQ(e.taps.size(), 1u);
    EXPECT_EQ(e.taps[0].di, static_cast<int>(std::floor((e.r * a + 1) / 2.0)));
    EXPECT_EQ(e.taps[0].dj, static_cast<int>(std::floor((e.s * b + 1) / 2.0)));
  }
  EXPECT_EQ(HalfOpenOffset(-1, 1), 0);
  EXPECT_EQ(HalfOpenOffset(1, 1), 1);
  EXPECT_EQ(HalfOpenOffset(-1, 2), -1);
  EXPECT_EQ(HalfOpenOffset(1, 3), 2);
  EXPECT_EQ(HalfOpenOffset(-1, 3), -1);

  const ShiftGenerators mid(grid, {1}, {2}, BoundaryRule::kMidpoint);
  for (const ShiftTableEntry& e : mid.shift_table()) {
    ASSERT_EQ(e.taps.size(), 2u);
    double total = 0.0;
    for (const ShiftTap& tap : e.taps) {
      EXPECT_EQ(tap.dj, e.s);
      total += tap.weight;
    }
    EXPECT_EQ(total, 1.0);
  }
}

TEST(ShiftMixtureTest, ZeroWeightSilencesGenerator) {
  TorusGrid grid(9);
  std::mt19937_64 gen(3);
  const Signal phi = RandomSignal(grid, gen);
  Eigen::VectorXd u(2);
  u << 1.0, 0.0;
  const ShiftMixtureGeneo both = MakeShiftMixture(grid, u, {2, 4}, {2, 4});
  const ShiftMixtureGeneo alone = MakeShiftMixture(grid, Eigen::VectorXd::Ones(1), {2}, {2});
  EXPECT_LE(NormInf(both.Apply(phi) - alone.Apply(phi) * (1.0 / std::sqrt(2.0))), 1e-15);
}

TEST(ShiftMixtureTest, UnitNormHandling) {
  TorusGrid grid(4);
  Eigen::VectorXd u(2);
  u << 0.6, 0.8;
  EXPECT_FALSE(MakeShiftMixture(grid, u, {1, 2}, {1, 2}).renormalized());
  u << 1.0, 1.0;
  const ShiftMixtureGeneo f = MakeShiftMixture(grid, u, {1, 2}, {1, 2});
  EXPECT_TRUE(f.renormalized());
  EXPECT_NEAR(f.u()[0], 1.0 / std::sqrt(2.0), 1e-16);
  EXPECT_NEAR(f.u().norm(), 1.0, 1e-15);
  EXPECT_THROW(MakeShiftMixture(grid, Eigen::VectorXd::Zero(2), {1, 2}, {1, 2}),
               std::invalid_argument);
  EXPECT_THROW(MakeShiftMixture(grid, Eigen::VectorXd::Ones(3), {1, 2}, {1, 2}),
               std::invalid_argument);
  EXPECT_THROW(MakeShiftMixture(grid, Eigen::VectorXd::Ones(1), {0}, {1}),
               std::invalid_argument);
  EXPECT_THROW(MakeShiftMixture(grid, Eigen::VectorXd::Ones(2), {1, 2}, {1}),
               std::invalid_argument);
}

TEST(ShiftMixtureTest, JsonRoundTrip) {
  TorusGrid grid(5);
  Eigen::VectorXd u(3);
  u << 0.48, 0.6, 0.64;
  const ShiftMixtureGeneo f = MakeShiftMixture(grid, u, {1, 2, 3}, {3, 2, 1}, BoundaryRule::kHalfOpen);
  const ShiftMixtureGeneo g = ShiftMixtureFromJson(ToJson(f));
  EXPECT_EQ(g.u(), f.u());
  EXPECT_EQ(g.generators().k(), f.generators().k());
  EXPECT_EQ(g.generators().h(), f.generators().h());
  EXPECT_EQ(g.generators().rule(), BoundaryRule::kHalfOpen);
  EXPECT_EQ(g.grid(), grid);
  EXPECT_EQ(ParseBoundaryRule(ToString(BoundaryRule::kMidpoint)), BoundaryRule::kMidpoint);
  EXPECT_THROW(ParseBoundaryRule("nearest"), std::invalid_argument);
}

TEST(NonexpansiveTest, FamilyStaysBelowOne) {
  const WeightedSignalSpace space = RandomSpace(10, 4, 4);
  std::mt19937_64 gen(4);
  for (int m : {1, 2, 5}) {
    std::vector<int> k, h;
    for (int t = 1; t <= m; ++t) {
      k.push_back(t);
      h.push_back(m + 1 - t);
    }
    const ShiftMixtureGeneo f = MakeShiftMixture(space.grid(), RandomUnit(m, gen), k, h);
    const NonexpansiveReport r = CheckNonexpansive(f.AsOperator(), space, 300, 1e-12, m);
    EXPECT_TRUE(r.ok);
    EXPECT_LE(r.max_ratio, 1.0 + 1e-12);
    EXPECT_EQ(r.pairs, 300);
  }
}

TEST(NonexpansiveTest, ConstantOffsetAttainsOne) {
  const WeightedSignalSpace space = RandomSpace(6, 3, 5);
  const ShiftMixtureGeneo f =
      MakeShiftMixture(space.grid(), Eigen::VectorXd::Ones(1), {1}, {3});
  const NonexpansiveReport r = CheckNonexpansive(f.AsOperator(), space, 30, 1e-12);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.max_ratio, 1.0, 1e-14);
}

TEST(NonexpansiveTest, ScaledOperatorIsCaught) {
  const WeightedSignalSpace space = RandomSpace(6, 3, 6);
  const ShiftMixtureGeneo f =
      MakeShiftMixture(space.grid(), Eigen::VectorXd::Ones(1), {2}, {2});
  const NonexpansiveReport r = CheckNonexpansive(f.AsOperator().Scaled(2.0), space, 30, 1e-12);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.violations, 0);
  EXPECT_NEAR(r.max_ratio, 2.0, 1e-13);
  EXPECT_THROW(CheckNonexpansive(f.AsOperator(), space, 0, 1e-12), std::invalid_argument);
}

TEST(EquivarianceTest, TranslationsAndReflections) {
  TorusGrid grid(8);
  std::mt19937_64 gen(7);
  std::vector<Signal> probes = {RandomSignal(grid, gen), RandomSignal(grid, gen)};
  for (const auto& [k, h] : std::vector<std::pair<std::vector<int>, std::vector<int>>>{
           {{1, 2}, {1, 2}}, {{3}, {1}}, {{1, 2, 5}, {4, 3, 1}}}) {
    const ShiftMixtureGeneo f =
        MakeShiftMixture(grid, RandomUnit(static_cast<int>(k.size()), gen), k, h);
    const EquivarianceReport r = CheckEquivariance(
        f.AsOperator(), TranslationsAndReflections(grid), probes, IdentityHomomorphism(), 1e-12);
    EXPECT_TRUE(r.ok) << r.worst_element << " " << r.max_defect;
    EXPECT_EQ(r.checks, 2 * (64 + 2));
  }
}

TEST(EquivarianceTest, HalfOpenBreaksReflectionForOddShifts) {
  TorusGrid grid(8);
  std::mt19937_64 gen(8);
  const std::vector<Signal> probes = {RandomSignal(grid, gen)};
  const ShiftMixtureGeneo odd =
      MakeShiftMixture(grid, RandomUnit(2, gen), {1, 2}, {1, 2}, BoundaryRule::kHalfOpen);
  const EquivarianceReport r = CheckEquivariance(
      odd.AsOperator(), {Reflection(grid, Axis::kX)}, probes, IdentityHomomorphism(), 1e-12);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.max_defect, 1e-3);
  const ShiftMixtureGeneo even =
      MakeShiftMixture(grid, RandomUnit(2, gen), {2, 4}, {2, 6}, BoundaryRule::kHalfOpen);
  EXPECT_TRUE(CheckEquivariance(even.AsOperator(), TranslationsAndReflections(grid), probes,
                                IdentityHomomorphism(), 1e-12)
                  .ok);
}

TEST(EquivarianceTest, SwapNeedsEqualShifts) {
  TorusGrid grid(8);
  std::mt19937_64 gen(9);
  const std::vector<Signal> probes = {RandomSignal(grid, gen)};
  const ShiftMixtureGeneo unequal = MakeShiftMixture(grid, RandomUnit(1, gen), {1}, {3});
  EXPECT_GT(CheckEquivariance(unequal.AsOperator(), {SwapAxes(grid)}, probes,
                              IdentityHomomorphism(), 1e-12)
                .max_defect,
            1e-3);
  const ShiftMixtureGeneo equal = MakeShiftMixture(grid, RandomUnit(2, gen), {1, 3}, {1, 3});
  EXPECT_TRUE(CheckEquivariance(equal.AsOperator(), {SwapAxes(grid)}, probes,
                                IdentityHomomorphism(), 1e-12)
                  .ok);
}

TEST(OperatorTest, ConvexComboEndpointsAndRange) {
  TorusGrid grid(5);
  std::mt19937_64 gen(10);
  const Operator f1 = MakeShiftMixture(grid, RandomUnit(2, gen), {1, 2}, {1, 2}).AsOperator();
  const Operator f2 = MakeShiftMixture(grid, RandomUnit(2, gen), {1, 2}, {1, 2}).AsOperator();
  const Signal phi = RandomSignal(grid, gen);
  EXPECT_EQ(ConvexCombo(f1, f2, 0.0)(phi), f1(phi));
  EXPECT_EQ(ConvexCombo(f1, f2, 1.0)(phi), f2(phi));
  EXPECT_THROW(ConvexCombo(f1, f2, 1.5), std::invalid_argument);
  EXPECT_THROW(ConvexCombo(f1, f2, -0.1), std::invalid_argument);
  EXPECT_THROW(Operator::Identity(grid)(Signal::Zero(TorusGrid(4))), std::invalid_argument);
}

TEST(OperatorTest, ConvexCombinationsStayGeneos) {
  const WeightedSignalSpace space = RandomSpace(8, 3, 11);
  std::mt19937_64 gen(11);
  const ShiftGenerators gens(space.grid(), {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  for (int pair = 0; pair < 10; ++pair) {
    const Operator half = ConvexCombo(MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator(),
                                      MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator(), 0.5);
    EXPECT_TRUE(CheckNonexpansive(half, space, 60, 1e-12, pair).ok);
    EXPECT_TRUE(CheckEquivariance(half, TranslationsAndReflections(space.grid()),
                                  {space.signals()[0]}, IdentityHomomorphism(), 1e-12)
                    .ok);
  }
}

TEST(OperatorNormTest, DefinitionsAndBounds) {
  TorusGrid grid(4);
  std::mt19937_64 gen(12);
  std::vector<Signal> unit;
  for (int s = 0; s < 3; ++s) {
    const Signal x = RandomSignal(grid, gen);
    unit.push_back(x * (1.0 / NormV(x)));
  }
  const OperatorContext ctx = OperatorContext::SameSpace(WeightedSignalSpace(unit, {1, 1, 2}));
  const Operator zero = Operator::Zero(grid);
  EXPECT_EQ(OpNormInf(zero, ctx), 0.0);
  EXPECT_EQ(OpNormV2(zero, ctx), 0.0);
  EXPECT_EQ(OpNormL2(zero, ctx), 0.0);
  EXPECT_NEAR(OpNormV2(Operator::Identity(grid), ctx), 1.0, 1e-15);

  const ShiftGenerators gens(grid, {1, 2}, {1, 2}, BoundaryRule::kMidpoint);
  const Operator f = MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator();
  EXPECT_NEAR(OpInner(f, f, ctx), std::pow(OpNormL2(f, ctx), 2), 1e-15);
  EXPECT_EQ(OpInner(f, zero, ctx), 0.0);
  const EquivalenceConstants c = GetEquivalenceConstants(grid);
  for (int i = 0; i < 20; ++i) {
    const Operator d = Difference(MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator(),
                                  MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator());
    EXPECT_LE(OpNormL2(d, ctx), OpNormV2(d, ctx) * (1 + 1e-12));
    EXPECT_LE(c.alpha * OpNormInf(d, ctx), OpNormV2(d, ctx) * (1 + 1e-12));
    EXPECT_LE(OpNormV2(d, ctx), c.beta * OpNormInf(d, ctx) * (1 + 1e-12));
  }
}

TEST(OperatorNormTest, InnerProductIsBilinear) {
  const WeightedSignalSpace space = RandomSpace(5, 3, 13);
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  std::mt19937_64 gen(13);
  const ShiftGenerators gens(space.grid(), {1, 3}, {2, 1}, BoundaryRule::kMidpoint);
  for (int i = 0; i < 10; ++i) {
    const Operator a = MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator();
    const Operator b = MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator();
    const Operator c = MakeShiftMixture(gens, RandomUnit(2, gen)).AsOperator();
    const double lhs = OpInner(ConvexCombo(a, b, 0.25), c, ctx);
    const double rhs = 0.75 * OpInner(a, c, ctx) + 0.25 * OpInner(b, c, ctx);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    EXPECT_NEAR(OpInner(a, b, ctx), OpInner(b, a, ctx), 1e-15);
  }
}

TEST(GramMatrixTest, ReproducesOperatorDistances) {
  const WeightedSignalSpace space = RandomSpace(7, 5, 14);
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  std::mt19937_64 gen(14);
  const ShiftGenerators gens(space.grid(), {1, 2, 3}, {2, 1, 3}, BoundaryRule::kMidpoint);
  const GramMatrix q = ComputeGramMatrix(gens, space);
  EXPECT_TRUE(q.IsPsd());
  EXPECT_EQ(q.matrix(), q.matrix().transpose());
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd u1 = RandomUnit(3, gen), u2 = RandomUnit(3, gen);
    const double direct = std::pow(
        OpNormL2(Difference(MakeShiftMixture(gens, u1).AsOperator(),
                            MakeShiftMixture(gens, u2).AsOperator()),
                 ctx),
        2);
    EXPECT_NEAR(q.Distance2(u1, u2), direct, 1e-10 * direct);
  }
}

TEST(GramMatrixTest, ConstantSignalIsRankOne) {
  TorusGrid grid(6);
  const Signal phi = Signal::Constant(grid, 0.5);
  const WeightedSignalSpace space({phi}, {1.0});
  const int m = 3;
  const ShiftGenerators gens(grid, {1, 2, 5}, {3, 1, 2}, BoundaryRule::kMidpoint);
  const GramMatrix q = ComputeGramMatrix(gens, space);
  const double expected = InnerProduct(phi, phi) / m;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) EXPECT_NEAR(q.matrix()(a, b), expected, 1e-15);
  }
  EXPECT_NEAR(q.MinEigenvalue(), 0.0, 1e-12);
  const ShiftGenerators one(grid, {1}, {1}, BoundaryRule::kMidpoint);
  const GramMatrix q1 = ComputeGramMatrix(one, space);
  EXPECT_EQ(q1.m(), 1);
  EXPECT_GE(q1.matrix()(0, 0), 0.0);
}

TEST(HomomorphismTest, IdentityHasNoDefect) {
  const WeightedSignalSpace space = RandomSpace(4, 2, 15);
  const OperatorContext ctx = OperatorContext::SameSpace(space);
  EXPECT_EQ(HomomorphismDefect(ctx, EnumerateGroup(space.grid())), 0);
  OperatorContext broken = ctx;
  broken.T = [](const GridIsometry& g) { return Compose(g, Translation(g.grid(), 1, 0)); };
  EXPECT_GT(HomomorphismDefect(broken, {Translation(space.grid(), 1, 2)}), 0);
}

}  // namespace
}  // namespace geneo
