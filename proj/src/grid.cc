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

#include "geneo/grid.h"

#include "geneo/errors.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace geneo {

TorusGrid::TorusGrid(int n) : n_(n) {
  if (n < 2) {
    throw std::invalid_argument("grid size must be at least 2, got " +
                                std::to_string(n));
  }
}

TorusGrid MakeGrid(int n) { return TorusGrid(n); }

void RequireSameGrid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": grid mismatch (n=" +
                                std::to_string(a.n()) + " vs n=" +
                                std::to_string(b.n()) + ")");
  }
}

Signal::Signal(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.site_count())) {
    throw std::invalid_argument("signal has " + std::to_string(values_.size()) +
                                " values, grid needs " +
                                std::to_string(grid_.site_count()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("signal values must be finite");
    }
  }
}

Signal Signal::Zero(TorusGrid grid) { return Constant(grid, 0.0); }

Signal Signal::Constant(TorusGrid grid, double value) {
  return Signal(grid, std::vector<double>(grid.site_count(), value));
}

Signal Signal::Basis(TorusGrid grid, int i, int j) {
  std::vector<double> values(grid.site_count(), 0.0);
  values[grid.Index(i, j)] = 1.0;
  return Signal(grid, std::move(values));
}

Signal Signal::operator+(const Signal& other) const {
  RequireSameGrid(grid_, other.grid_, "signal addition");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values_[i] + other.values_[i];
  }
  return Signal(grid_, std::move(out));
}

Signal Signal::operator-(const Signal& other) const {
  RequireSameGrid(grid_, other.grid_, "signal subtraction");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values_[i] - other.values_[i];
  }
  return Signal(grid_, std::move(out));
}

Signal Signal::operator*(double scale) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= scale;
  return Signal(grid_, std::move(out));
}

double SymmetricSum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

double InnerProduct(const Signal& a, const Signal& b) {
  RequireSameGrid(a.grid(), b.grid(), "inner product");
  std::vector<double> products(a.size());
  for (std::size_t i = 0; i < products.size(); ++i) products[i] = a[i] * b[i];
  return SymmetricSum(std::move(products));
}

double NormV(const Signal& s) { return std::sqrt(InnerProduct(s, s)); }

double NormInf(const Signal& s) {
  double best = 0.0;
  for (double v : s.values()) best = std::max(best, std::abs(v));
  return best;
}

EquivalenceConstants GetEquivalenceConstants(const TorusGrid& grid) {
  // ||x||_2 <= sqrt(n^2) ||x||_inf, and ||x||_inf <= ||x||_2.
  return {1.0, static_cast<double>(grid.n())};
}

WeightedSignalSpace::WeightedSignalSpace(std::vector<Signal> signals,
                                         std::vector<double> weights)
    : grid_(signals.empty() ? TorusGrid(2) : signals.front().grid()),
      signals_(std::move(signals)),
      weights_(std::move(weights)) {
  if (signals_.empty()) {
    throw std::invalid_argument("signal space needs at least one signal");
  }
  if (signals_.size() != weights_.size()) {
    throw std::invalid_argument("got " + std::to_string(signals_.size()) +
                                " signals but " +
                                std::to_string(weights_.size()) + " weights");
  }
  for (const Signal& s : signals_) RequireSameGrid(grid_, s.grid(), "space");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("weights must not all be zero");
  }
  for (double& w : weights_) w /= sum;
  validation_.input_sum = sum;
  validation_.flagged = std::abs(sum - 1.0) > kWeightTolerance;
}

WeightedSignalSpace MakeSpace(std::vector<Signal> signals,
                              std::vector<double> weights) {
  return WeightedSignalSpace(std::move(signals), std::move(weights));
}

Signal ParseSignalCsv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("signal CSV: bad number '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument("signal CSV: bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  std::vector<double> values;
  values.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw std::invalid_argument("signal CSV must be square: " +
                                  std::to_string(n) + " rows but a row has " +
                                  std::to_string(row.size()) + " entries");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return Signal(TorusGrid(static_cast<int>(n)), std::move(values));
}

std::string FormatSignalCsv(const Signal& signal) {
  std::string out;
  const int n = signal.grid().n();
  char buf[32];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", signal.at(i, j));
      if (j > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Signal ReadSignalCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSignalCsv(buffer.str());
}

void WriteSignalCsv(const Signal& signal, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << FormatSignalCsv(signal);
}

}  // namespace geneo
