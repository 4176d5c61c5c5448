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

#ifndef GENEO_GROUP_H_
#define GENEO_GROUP_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geneo/grid.h"
#include "json.hpp"

namespace geneo {

// Affine description of a lattice symmetry: a site x = (i, j) maps to
// A x + (dx, dy) mod n with A = diag(+-1, +-1) * (swap ? [[0,1],[1,0]] : I).
// In words: swap the axes first, then flip, then translate.
struct IsometryDescriptor {
  int dx = 0;
  int dy = 0;
  bool flip_x = false;
  bool flip_y = false;
  bool swap = false;

  friend bool operator==(const IsometryDescriptor&,
                         const IsometryDescriptor&) = default;
};

// Element of the finite group of torus isometries preserving the grid, held
// as a site permutation: perm[s] is the image of site s. The descriptor is
// kept for elements built from generators and dropped for raw permutations.
class GridIsometry {
 public:
  static GridIsometry Identity(const TorusGrid& grid);
  static GridIsometry FromDescriptor(const TorusGrid& grid,
                                     IsometryDescriptor descriptor);
  // Throws std::invalid_argument unless perm is a bijection on the sites.
  static GridIsometry FromPermutation(const TorusGrid& grid,
                                      std::vector<int> perm);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<int>& perm() const { return perm_; }
  const std::optional<IsometryDescriptor>& descriptor() const {
    return descriptor_;
  }
  int operator()(int site) const { return perm_[site]; }
  bool IsIdentity() const;

  // Short human-readable label, e.g. "t(1,0)" or "t(0,2)|fx|sw".
  std::string Label() const;

  // Equality is equality of permutations.
  friend bool operator==(const GridIsometry& a, const GridIsometry& b) {
    return a.grid_ == b.grid_ && a.perm_ == b.perm_;
  }

 private:
  friend GridIsometry Compose(const GridIsometry&, const GridIsometry&);
  friend GridIsometry Inverse(const GridIsometry&);

  GridIsometry(TorusGrid grid, std::vector<int> perm,
               std::optional<IsometryDescriptor> descriptor)
      : grid_(grid), perm_(std::move(perm)), descriptor_(descriptor) {}

  TorusGrid grid_;
  std::vector<int> perm_;
  std::optional<IsometryDescriptor> descriptor_;
};

enum class Axis { kX, kY };

// (i, j) -> (i + dx, j + dy) mod n.
GridIsometry Translation(const TorusGrid& grid, int dx, int dy);
// kX: (i, j) -> (-i, j); kY: (i, j) -> (i, -j).
GridIsometry Reflection(const TorusGrid& grid, Axis axis);
// (i, j) -> (j, i).
GridIsometry SwapAxes(const TorusGrid& grid);

// Right-action convention: Compose(g1, g2) applies g1 first, so that
// Act(phi, Compose(g1, g2)) == Act(Act(phi, g1), g2). As site maps this is
// perm[s] = g1.perm[g2.perm[s]].
GridIsometry Compose(const GridIsometry& g1, const GridIsometry& g2);
GridIsometry Inverse(const GridIsometry& g);

// The right action phi -> phi g: result at site s is phi at g(s).
Signal Act(const Signal& phi, const GridIsometry& g);

// Descriptor algebra, independent of the permutation representation.
IsometryDescriptor ComposeDescriptors(const IsometryDescriptor& d1,
                                      const IsometryDescriptor& d2, int n);
IsometryDescriptor InverseDescriptor(const IsometryDescriptor& d, int n);

inline constexpr std::size_t kDefaultGroupBudget = 200000;

// All products of translations with the 8-element point group, deduplicated
// by permutation, identity first. Throws std::length_error when 8 n^2 exceeds
// max_elements.
std::vector<GridIsometry> EnumerateGroup(
    const TorusGrid& grid, std::size_t max_elements = kDefaultGroupBudget);

// The n^2 translations followed by the two axis reflections.
std::vector<GridIsometry> TranslationsAndReflections(const TorusGrid& grid);

// Smallest G-invariant support containing the space: every signal is
// replaced by its orbit under `group`, its weight spread evenly over the
// distinct orbit members. `group` must be closed under composition for the
// result to be invariant.
WeightedSignalSpace OrbitClosure(const WeightedSignalSpace& space,
                                 const std::vector<GridIsometry>& group);

// {n, dx, dy, flip_x, flip_y, swap} when a descriptor is known, otherwise
// {n, perm: [...]}.
nlohmann::json ToJson(const GridIsometry& g);
GridIsometry IsometryFromJson(const nlohmann::json& j);

}  // namespace geneo

#endif  // GENEO_GROUP_H_
