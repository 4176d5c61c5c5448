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

#include "geneo/group.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace geneo {
namespace {

using Mat2 = std::array<std::array<int, 2>, 2>;

Mat2 LinearPart(const IsometryDescriptor& d) {
  const int fx = d.flip_x ? -1 : 1;
  const int fy = d.flip_y ? -1 : 1;
  if (d.swap) return Mat2{{{0, fx}, {fy, 0}}};
  return Mat2{{{fx, 0}, {0, fy}}};
}

Mat2 Multiply(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) {
      c[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
    }
  }
  return c;
}

Mat2 Transpose(const Mat2& a) { return Mat2{{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

int Mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

IsometryDescriptor FromAffine(const Mat2& a, int dx, int dy, int n) {
  IsometryDescriptor d;
  d.swap = a[0][0] == 0;
  // a = diag(fx, fy) * S, so the nonzero entry of row 0 is fx, of row 1 is fy.
  d.flip_x = (d.swap ? a[0][1] : a[0][0]) < 0;
  d.flip_y = (d.swap ? a[1][0] : a[1][1]) < 0;
  d.dx = Mod(dx, n);
  d.dy = Mod(dy, n);
  return d;
}

std::vector<int> PermFromDescriptor(const TorusGrid& grid,
                                    const IsometryDescriptor& d) {
  const Mat2 a = LinearPart(d);
  std::vector<int> perm(grid.site_count());
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) {
      const int ti = a[0][0] * i + a[0][1] * j + d.dx;
      const int tj = a[1][0] * i + a[1][1] * j + d.dy;
      perm[grid.Index(i, j)] = grid.Index(ti, tj);
    }
  }
  return perm;
}

struct PermHash {
  std::size_t operator()(const std::vector<int>& p) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : p) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

GridIsometry GridIsometry::Identity(const TorusGrid& grid) {
  return FromDescriptor(grid, IsometryDescriptor{});
}

GridIsometry GridIsometry::FromDescriptor(const TorusGrid& grid,
                                          IsometryDescriptor descriptor) {
  descriptor.dx = Mod(descriptor.dx, grid.n());
  descriptor.dy = Mod(descriptor.dy, grid.n());
  return GridIsometry(grid, PermFromDescriptor(grid, descriptor), descriptor);
}

GridIsometry GridIsometry::FromPermutation(const TorusGrid& grid,
                                           std::vector<int> perm) {
  if (perm.size() != static_cast<std::size_t>(grid.site_count())) {
    throw std::invalid_argument("permutation length " +
                                std::to_string(perm.size()) +
                                " does not match grid site count " +
                                std::to_string(grid.site_count()));
  }
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || v >= grid.site_count() || seen[v]) {
      throw std::invalid_argument("site map is not a bijection");
    }
    seen[v] = true;
  }
  return GridIsometry(grid, std::move(perm), std::nullopt);
}

bool GridIsometry::IsIdentity() const {
  for (std::size_t s = 0; s < perm_.size(); ++s) {
    if (perm_[s] != static_cast<int>(s)) return false;
  }
  return true;
}

std::string GridIsometry::Label() const {
  if (!descriptor_) {
    return IsIdentity() ? "id" : "perm";
  }
  const IsometryDescriptor& d = *descriptor_;
  std::string out =
      "t(" + std::to_string(d.dx) + "," + std::to_string(d.dy) + ")";
  if (d.flip_x) out += "|fx";
  if (d.flip_y) out += "|fy";
  if (d.swap) out += "|sw";
  return out;
}

GridIsometry Translation(const TorusGrid& grid, int dx, int dy) {
  return GridIsometry::FromDescriptor(grid, {dx, dy, false, false, false});
}

GridIsometry Reflection(const TorusGrid& grid, Axis axis) {
  return GridIsometry::FromDescriptor(
      grid, {0, 0, axis == Axis::kX, axis == Axis::kY, false});
}

GridIsometry SwapAxes(const TorusGrid& grid) {
  return GridIsometry::FromDescriptor(grid, {0, 0, false, false, true});
}

IsometryDescriptor ComposeDescriptors(const IsometryDescriptor& d1,
                                      const IsometryDescriptor& d2, int n) {
  // x -> A1 (A2 x + d2) + d1.
  const Mat2 a1 = LinearPart(d1);
  const Mat2 a2 = LinearPart(d2);
  const int dx = a1[0][0] * d2.dx + a1[0][1] * d2.dy + d1.dx;
  const int dy = a1[1][0] * d2.dx + a1[1][1] * d2.dy + d1.dy;
  return FromAffine(Multiply(a1, a2), dx, dy, n);
}

IsometryDescriptor InverseDescriptor(const IsometryDescriptor& d, int n) {
  // x = A^T (y - d) for a signed permutation matrix A.
  const Mat2 at = Transpose(LinearPart(d));
  const int dx = -(at[0][0] * d.dx + at[0][1] * d.dy);
  const int dy = -(at[1][0] * d.dx + at[1][1] * d.dy);
  return FromAffine(at, dx, dy, n);
}

GridIsometry Compose(const GridIsometry& g1, const GridIsometry& g2) {
  RequireSameGrid(g1.grid(), g2.grid(), "compose");
  std::vector<int> perm(g1.perm().size());
  for (std::size_t s = 0; s < perm.size(); ++s) perm[s] = g1(g2(s));
  std::optional<IsometryDescriptor> descriptor;
  if (g1.descriptor() && g2.descriptor()) {
    descriptor =
        ComposeDescriptors(*g1.descriptor(), *g2.descriptor(), g1.grid().n());
  }
  return GridIsometry(g1.grid(), std::move(perm), descriptor);
}

GridIsometry Inverse(const GridIsometry& g) {
  std::vector<int> perm(g.perm().size());
  for (std::size_t s = 0; s < perm.size(); ++s) perm[g(s)] = static_cast<int>(s);
  std::optional<IsometryDescriptor> descriptor;
  if (g.descriptor()) {
    descriptor = InverseDescriptor(*g.descriptor(), g.grid().n());
  }
  return GridIsometry(g.grid(), std::move(perm), descriptor);
}

Signal Act(const Signal& phi, const GridIsometry& g) {
  RequireSameGrid(phi.grid(), g.grid(), "act");
  std::vector<double> out(phi.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = phi[g(s)];
  return Signal(phi.grid(), std::move(out));
}

std::vector<GridIsometry> EnumerateGroup(const TorusGrid& grid,
                                         std::size_t max_elements) {
  const std::size_t n = grid.n();
  if (8 * n * n > max_elements) {
    throw std::length_error("group of n=" + std::to_string(n) + " has up to " +
                            std::to_string(8 * n * n) +
                            " elements, budget is " +
                            std::to_string(max_elements));
  }
  std::vector<GridIsometry> out;
  std::unordered_set<std::vector<int>, PermHash> seen;
  for (int swap = 0; swap < 2; ++swap) {
    for (int fx = 0; fx < 2; ++fx) {
      for (int fy = 0; fy < 2; ++fy) {
        for (int dx = 0; dx < grid.n(); ++dx) {
          for (int dy = 0; dy < grid.n(); ++dy) {
            GridIsometry g = GridIsometry::FromDescriptor(
                grid, {dx, dy, fx == 1, fy == 1, swap == 1});
            if (seen.insert(g.perm()).second) out.push_back(std::move(g));
          }
        }
      }
    }
  }
  return out;
}

std::vector<GridIsometry> TranslationsAndReflections(const TorusGrid& grid) {
  std::vector<GridIsometry> out;
  out.reserve(grid.site_count() + 2);
  for (int dx = 0; dx < grid.n(); ++dx) {
    for (int dy = 0; dy < grid.n(); ++dy) out.push_back(Translation(grid, dx, dy));
  }
  out.push_back(Reflection(grid, Axis::kX));
  out.push_back(Reflection(grid, Axis::kY));
  return out;
}

WeightedSignalSpace OrbitClosure(const WeightedSignalSpace& space,
                                 const std::vector<GridIsometry>& group) {
  std::vector<Signal> members;
  std::vector<double> weights;
  std::map<std::vector<double>, std::size_t> index;
  for (std::size_t s = 0; s < space.size(); ++s) {
    std::vector<std::size_t> orbit;
    for (const GridIsometry& g : group) {
      Signal image = Act(space.signals()[s], g);
      std::vector<double> key(image.values().begin(), image.values().end());
      auto [it, inserted] = index.emplace(std::move(key), members.size());
      if (inserted) {
        members.push_back(std::move(image));
        weights.push_back(0.0);
      }
      if (std::find(orbit.begin(), orbit.end(), it->second) == orbit.end()) {
        orbit.push_back(it->second);
      }
    }
    const double share = space.weights()[s] / static_cast<double>(orbit.size());
    for (std::size_t member : orbit) weights[member] += share;
  }
  return WeightedSignalSpace(std::move(members), std::move(weights));
}

nlohmann::json ToJson(const GridIsometry& g) {
  nlohmann::json j;
  j["n"] = g.grid().n();
  if (g.descriptor()) {
    const IsometryDescriptor& d = *g.descriptor();
    j["dx"] = d.dx;
    j["dy"] = d.dy;
    j["flip_x"] = d.flip_x;
    j["flip_y"] = d.flip_y;
    j["swap"] = d.swap;
  } else {
    j["perm"] = g.perm();
  }
  return j;
}

GridIsometry IsometryFromJson(const nlohmann::json& j) {
  const TorusGrid grid(j.at("n").get<int>());
  if (j.contains("perm")) {
    return GridIsometry::FromPermutation(grid, j.at("perm").get<std::vector<int>>());
  }
  IsometryDescriptor d;
  d.dx = j.value("dx", 0);
  d.dy = j.value("dy", 0);
  d.flip_x = j.value("flip_x", false);
  d.flip_y = j.value("flip_y", false);
  d.swap = j.value("swap", false);
  return GridIsometry::FromDescriptor(grid, d);
}

}  // namespace geneo
