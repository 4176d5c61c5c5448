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

#ifndef GENEO_GRID_H_
#define GENEO_GRID_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace geneo {

// An n x n sampling of the torus S^1 x S^1 with periodic indexing. Site (i, j)
// sits at angles (2*pi*i/n, 2*pi*j/n) and is stored at flat index i*n + j.
class TorusGrid {
 public:
  // Throws std::invalid_argument for n < 2.
  explicit TorusGrid(int n);

  int n() const { return n_; }
  int site_count() const { return n_ * n_; }

  // Reduces (i, j) modulo n before flattening.
  int Index(int i, int j) const { return Wrap(i) * n_ + Wrap(j); }
  int Row(int index) const { return index / n_; }
  int Col(int index) const { return index % n_; }
  int Wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int n_;
};

TorusGrid MakeGrid(int n);

// Throws std::invalid_argument naming `what` when the grids differ.
void RequireSameGrid(const TorusGrid& a, const TorusGrid& b, const char* what);

// Pixel image on a TorusGrid. Entry (i, j) is the coefficient of the pixel
// indicator centred at site (i, j); all values are finite.
class Signal {
 public:
  Signal(TorusGrid grid, std::vector<double> values);

  static Signal Zero(TorusGrid grid);
  static Signal Constant(TorusGrid grid, double value);
  // Pixel basis element: 1 at (i, j), 0 elsewhere.
  static Signal Basis(TorusGrid grid, int i, int j);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double at(int i, int j) const { return values_[grid_.Index(i, j)]; }
  double operator[](std::size_t index) const { return values_[index]; }
  std::size_t size() const { return values_.size(); }

  Signal operator+(const Signal& other) const;
  Signal operator-(const Signal& other) const;
  Signal operator*(double scale) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

// Sum whose result depends only on the multiset of terms: the terms are
// sorted before accumulation, so any permutation of the input gives the same
// bits. Used wherever group actions must leave a quantity exactly unchanged.
double SymmetricSum(std::vector<double> terms);

// Euclidean dot product of the pixel arrays (G-invariant).
double InnerProduct(const Signal& a, const Signal& b);
double NormV(const Signal& s);
double NormInf(const Signal& s);

struct EquivalenceConstants {
  double alpha;
  double beta;
};

// alpha * NormInf <= NormV <= beta * NormInf on the grid; (1, n) here.
EquivalenceConstants GetEquivalenceConstants(const TorusGrid& grid);

// Validation notes recorded when building a WeightedSignalSpace.
struct WeightValidation {
  double input_sum = 1.0;
  // True when |input_sum - 1| exceeded kWeightTolerance. The weights were
  // still renormalized.
  bool flagged = false;
};

inline constexpr double kWeightTolerance = 1e-9;

// Finite support of the signal distribution with its probability weights.
class WeightedSignalSpace {
 public:
  // Weights must be nonnegative with positive sum; they are renormalized to
  // sum to 1. Throws std::invalid_argument otherwise, or when the lists are
  // empty, of unequal length, or on different grids.
  WeightedSignalSpace(std::vector<Signal> signals, std::vector<double> weights);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<Signal>& signals() const { return signals_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return signals_.size(); }
  const WeightValidation& validation() const { return validation_; }

 private:
  TorusGrid grid_;
  std::vector<Signal> signals_;
  std::vector<double> weights_;
  WeightValidation validation_;
};

WeightedSignalSpace MakeSpace(std::vector<Signal> signals,
                              std::vector<double> weights);

// CSV: n rows of n comma-separated reals.
Signal ReadSignalCsv(const std::string& path);
void WriteSignalCsv(const Signal& signal, const std::string& path);
Signal ParseSignalCsv(const std::string& text);
std::string FormatSignalCsv(const Signal& signal);

}  // namespace geneo

#endif  // GENEO_GRID_H_
