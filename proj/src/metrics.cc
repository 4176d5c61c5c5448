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

#include "geneo/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace geneo {
namespace {

constexpr std::size_t kMaxRecordedViolations = 64;

void RequireSite(const TorusGrid& grid, int site) {
  if (site < 0 || site >= grid.site_count()) {
    throw std::out_of_range("site " + std::to_string(site) +
                            " outside grid with " +
                            std::to_string(grid.site_count()) + " sites");
  }
}

// acted[e][s] = phi_s g_e.
std::vector<std::vector<Signal>> ActAll(
    const WeightedSignalSpace& space,
    const std::vector<GridIsometry>& elements) {
  std::vector<std::vector<Signal>> acted;
  acted.reserve(elements.size());
  for (const GridIsometry& g : elements) {
    RequireSameGrid(space.grid(), g.grid(), "group table");
    std::vector<Signal> row;
    row.reserve(space.size());
    for (const Signal& phi : space.signals()) row.push_back(Act(phi, g));
    acted.push_back(std::move(row));
  }
  return acted;
}

double WeightedNormGap(const WeightedSignalSpace& space,
                       const std::vector<Signal>& a,
                       const std::vector<Signal>& b) {
  std::vector<double> terms(space.size());
  for (std::size_t s = 0; s < terms.size(); ++s) {
    terms[s] = space.weights()[s] * NormV(a[s] - b[s]);
  }
  return SymmetricSum(std::move(terms));
}

double MaxInfGap(const std::vector<Signal>& a, const std::vector<Signal>& b) {
  double best = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    best = std::max(best, NormInf(a[s] - b[s]));
  }
  return best;
}

std::vector<std::string> SiteLabels(const TorusGrid& grid) {
  std::vector<std::string> labels;
  labels.reserve(grid.site_count());
  for (int s = 0; s < grid.site_count(); ++s) labels.push_back(SiteLabel(grid, s));
  return labels;
}

std::vector<std::string> ElementLabels(const std::vector<GridIsometry>& elements) {
  std::vector<std::string> labels;
  labels.reserve(elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    labels.push_back("g" + std::to_string(e) + ":" + elements[e].Label());
  }
  return labels;
}

}  // namespace

PseudoMetricTable::PseudoMetricTable(std::vector<std::string> labels,
                                     std::vector<double> d)
    : labels_(std::move(labels)), d_(std::move(d)) {
  if (d_.size() != labels_.size() * labels_.size()) {
    throw std::invalid_argument("table data does not match label count");
  }
}

double PseudoMetricTable::Diameter() const {
  double best = 0.0;
  for (double v : d_) best = std::max(best, v);
  return best;
}

double DeltaX(const WeightedSignalSpace& space, int x1, int x2) {
  RequireSite(space.grid(), x1);
  RequireSite(space.grid(), x2);
  std::vector<double> terms(space.size());
  for (std::size_t s = 0; s < terms.size(); ++s) {
    const Signal& phi = space.signals()[s];
    terms[s] = space.weights()[s] * std::abs(phi[x1] - phi[x2]);
  }
  return SymmetricSum(std::move(terms));
}

double DMaxX(const WeightedSignalSpace& space, int x1, int x2) {
  RequireSite(space.grid(), x1);
  RequireSite(space.grid(), x2);
  double best = 0.0;
  for (const Signal& phi : space.signals()) {
    best = std::max(best, std::abs(phi[x1] - phi[x2]));
  }
  return best;
}

double DeltaG(const WeightedSignalSpace& space, const GridIsometry& g1,
              const GridIsometry& g2) {
  const auto acted = ActAll(space, {g1, g2});
  return WeightedNormGap(space, acted[0], acted[1]);
}

double DMaxG(const WeightedSignalSpace& space, const GridIsometry& g1,
             const GridIsometry& g2) {
  const auto acted = ActAll(space, {g1, g2});
  return MaxInfGap(acted[0], acted[1]);
}

PseudoMetricTable BuildTable(std::vector<std::string> labels,
                             const MetricFn& metric) {
  const std::size_t count = labels.size();
  if (count == 0) throw std::invalid_argument("table needs at least one point");
  std::vector<double> d(count * count);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a; b < count; ++b) {
      const double v = metric(a, b);
      if (std::isnan(v) || v < 0.0) {
        throw std::invalid_argument("metric returned invalid value between " +
                                    labels[a] + " and " + labels[b]);
      }
      d[a * count + b] = v;
      d[b * count + a] = v;
    }
  }
  return PseudoMetricTable(std::move(labels), std::move(d));
}

std::string SiteLabel(const TorusGrid& grid, int site) {
  return "(" + std::to_string(grid.Row(site)) + "," +
         std::to_string(grid.Col(site)) + ")";
}

PseudoMetricTable DeltaXTable(const WeightedSignalSpace& space) {
  return BuildTable(SiteLabels(space.grid()), [&](std::size_t a, std::size_t b) {
    return DeltaX(space, static_cast<int>(a), static_cast<int>(b));
  });
}

PseudoMetricTable DMaxXTable(const WeightedSignalSpace& space) {
  return BuildTable(SiteLabels(space.grid()), [&](std::size_t a, std::size_t b) {
    return DMaxX(space, static_cast<int>(a), static_cast<int>(b));
  });
}

PseudoMetricTable DeltaGTable(const WeightedSignalSpace& space,
                              const std::vector<GridIsometry>& elements) {
  const auto acted = ActAll(space, elements);
  return BuildTable(ElementLabels(elements), [&](std::size_t a, std::size_t b) {
    return WeightedNormGap(space, acted[a], acted[b]);
  });
}

PseudoMetricTable DMaxGTable(const WeightedSignalSpace& space,
                             const std::vector<GridIsometry>& elements) {
  const auto acted = ActAll(space, elements);
  return BuildTable(ElementLabels(elements), [&](std::size_t a, std::size_t b) {
    return MaxInfGap(acted[a], acted[b]);
  });
}

EpsilonNet GreedyEpsilonNet(const PseudoMetricTable& table, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("epsilon must be a positive finite number");
  }
  const std::size_t count = table.size();
  std::size_t seed = 0;
  double best_mean = -1.0;
  for (std::size_t a = 0; a < count; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < count; ++b) sum += table.at(a, b);
    if (sum > best_mean) {
      best_mean = sum;
      seed = a;
    }
  }
  EpsilonNet net;
  std::vector<double> gap(count);
  auto add = [&](std::size_t p) {
    net.indices.push_back(p);
    net.labels.push_back(table.labels()[p]);
    for (std::size_t b = 0; b < count; ++b) {
      gap[b] = net.indices.size() == 1 ? table.at(p, b)
                                       : std::min(gap[b], table.at(p, b));
    }
  };
  add(seed);
  while (true) {
    std::size_t far = 0;
    double far_gap = -1.0;
    for (std::size_t b = 0; b < count; ++b) {
      if (gap[b] > far_gap) {
        far_gap = gap[b];
        far = b;
      }
    }
    if (far_gap <= eps) {
      net.cover_radius = std::max(far_gap, 0.0);
      break;
    }
    add(far);
  }
  return net;
}

PseudoMetricReport CheckPseudometric(const PseudoMetricTable& table,
                                     double slack) {
  PseudoMetricReport report;
  report.worst_triangle = -std::numeric_limits<double>::infinity();
  auto record = [&](MetricViolation v) {
    report.ok = false;
    ++report.violation_count;
    if (report.violations.size() < kMaxRecordedViolations) {
      report.violations.push_back(v);
    }
  };
  const std::size_t count = table.size();
  for (std::size_t a = 0; a < count; ++a) {
    const double diag = std::abs(table.at(a, a));
    report.worst_diagonal = std::max(report.worst_diagonal, diag);
    if (diag != 0.0) record({MetricViolation::Kind::kDiagonal, a, a, a, diag});
    for (std::size_t b = 0; b < count; ++b) {
      const double v = table.at(a, b);
      if (std::isnan(v) || v < 0.0) {
        record({MetricViolation::Kind::kNegative, a, b, b, v});
      }
      if (b > a) {
        const double asym = std::abs(v - table.at(b, a));
        report.worst_asymmetry = std::max(report.worst_asymmetry, asym);
        if (asym != 0.0) {
          record({MetricViolation::Kind::kAsymmetry, a, b, b, asym});
        }
      }
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      const double ab = table.at(a, b);
      for (std::size_t c = 0; c < count; ++c) {
        const double excess = table.at(a, c) - ab - table.at(b, c);
        report.worst_triangle = std::max(report.worst_triangle, excess);
        if (excess > slack) {
          record({MetricViolation::Kind::kTriangle, a, b, c, excess});
        }
      }
    }
  }
  return report;
}

std::string TableToCsv(const PseudoMetricTable& table) {
  std::string out = "label";
  for (const auto& label : table.labels()) out += ",\"" + label + "\"";
  out += '\n';
  char buf[32];
  for (std::size_t a = 0; a < table.size(); ++a) {
    out += "\"" + table.labels()[a] + "\"";
    for (std::size_t b = 0; b < table.size(); ++b) {
      std::snprintf(buf, sizeof(buf), ",%.17g", table.at(a, b));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

nlohmann::json TableToJson(const PseudoMetricTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t a = 0; a < table.size(); ++a) {
    std::vector<double> row(table.size());
    for (std::size_t b = 0; b < table.size(); ++b) row[b] = table.at(a, b);
    rows.push_back(row);
  }
  return {{"labels", table.labels()}, {"d", rows}};
}

}  // namespace geneo
