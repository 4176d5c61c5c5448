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

#ifndef GENEO_METRICS_H_
#define GENEO_METRICS_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "geneo/grid.h"
#include "geneo/group.h"
#include "json.hpp"

namespace geneo {

// Square table of pairwise pseudo-distances between labelled points, stored
// row-major. Distinct points may be at distance zero.
class PseudoMetricTable {
 public:
  PseudoMetricTable(std::vector<std::string> labels, std::vector<double> d);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double at(std::size_t a, std::size_t b) const { return d_[a * size() + b]; }
  const std::vector<double>& data() const { return d_; }
  double Diameter() const;

  // For fault-injection tests; tables are otherwise treated as immutable.
  void Set(std::size_t a, std::size_t b, double value) {
    d_[a * size() + b] = value;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> d_;
};

// Expected absolute difference of signal values at two sites, weighted by the
// space's probabilities. Sites are flat indices; throws std::out_of_range.
double DeltaX(const WeightedSignalSpace& space, int x1, int x2);
// Largest absolute difference over the support.
double DMaxX(const WeightedSignalSpace& space, int x1, int x2);

// Weighted mean of ||phi g1 - phi g2||_V over the support.
double DeltaG(const WeightedSignalSpace& space, const GridIsometry& g1,
              const GridIsometry& g2);
// max over the support of ||phi g1 - phi g2||_inf.
double DMaxG(const WeightedSignalSpace& space, const GridIsometry& g1,
             const GridIsometry& g2);

using MetricFn = std::function<double(std::size_t, std::size_t)>;

// Evaluates metric(a, b) for a <= b and mirrors it. Throws
// std::invalid_argument if a value is negative or NaN, or labels is empty.
PseudoMetricTable BuildTable(std::vector<std::string> labels,
                             const MetricFn& metric);

std::string SiteLabel(const TorusGrid& grid, int site);

// Tables over every site of the grid.
PseudoMetricTable DeltaXTable(const WeightedSignalSpace& space);
PseudoMetricTable DMaxXTable(const WeightedSignalSpace& space);
// Tables over a list of group elements. Each signal is acted on once per
// element up front.
PseudoMetricTable DeltaGTable(const WeightedSignalSpace& space,
                              const std::vector<GridIsometry>& elements);
PseudoMetricTable DMaxGTable(const WeightedSignalSpace& space,
                             const std::vector<GridIsometry>& elements);

struct EpsilonNet {
  std::vector<std::size_t> indices;
  std::vector<std::string> labels;
  // Largest distance from any point to its nearest net point.
  double cover_radius = 0.0;
};

// Farthest-point greedy cover. Seeds at the point of largest mean distance
// (lowest index on ties) and keeps adding the point farthest from the net
// while that distance exceeds eps. Net points end up pairwise more than eps
// apart. Throws std::invalid_argument for eps <= 0.
EpsilonNet GreedyEpsilonNet(const PseudoMetricTable& table, double eps);

inline constexpr double kTriangleSlack = 1e-9;

struct MetricViolation {
  enum class Kind { kNegative, kDiagonal, kAsymmetry, kTriangle };
  Kind kind;
  std::size_t a = 0, b = 0, c = 0;
  double amount = 0.0;
};

struct PseudoMetricReport {
  bool ok = true;
  std::size_t violation_count = 0;
  // First violations in scan order, capped.
  std::vector<MetricViolation> violations;
  double worst_diagonal = 0.0;
  double worst_asymmetry = 0.0;
  // max over triples of d(a,c) - d(a,b) - d(b,c); negative when strict.
  double worst_triangle = 0.0;
};

PseudoMetricReport CheckPseudometric(const PseudoMetricTable& table,
                                     double slack = kTriangleSlack);

std::string TableToCsv(const PseudoMetricTable& table);
nlohmann::json TableToJson(const PseudoMetricTable& table);

}  // namespace geneo

#endif  // GENEO_METRICS_H_
