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

#ifndef GENEO_VERIFY_H_
#define GENEO_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "geneo/grid.h"
#include "geneo/operator.h"

namespace geneo {

struct VerifyOptions {
  int n = 28;
  int m = 2;
  std::vector<int> k = {1, 2};
  std::vector<int> h = {1, 2};
  BoundaryRule boundary = BoundaryRule::kMidpoint;
  std::uint64_t seed = 1;
  // Multiplies every tested family member; anything above 1 must trip the
  // non-expansiveness check.
  double inject_scale = 1.0;
  // Exhaustive group checks over the whole enumerated group (n <= 3).
  bool group_full = false;
  int trials = 200;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  // Reported but never counted as a failure.
  bool informational = false;
  // Largest observed slack or defect, in the property's own units.
  double worst = 0.0;
  std::string detail;
};

// Default verification space: synthetic glyphs for n >= 8, otherwise random
// signals, with uniform weights.
WeightedSignalSpace DefaultVerifySpace(int n, std::uint64_t seed);

// Runs the operator, metric and group property suites on `space`.
std::vector<PropertyResult> RunVerification(const WeightedSignalSpace& space,
                                            const VerifyOptions& options);

bool AllPassed(const std::vector<PropertyResult>& results);

}  // namespace geneo

#endif  // GENEO_VERIFY_H_
