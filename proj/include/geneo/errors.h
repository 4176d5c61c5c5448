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

#ifndef GENEO_ERRORS_H_
#define GENEO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace geneo {

// File system or decoding failure on external input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two configuration points whose quadratic-form distance fell below the
// collision guard; the repulsion energy is singular there.
class CollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geneo

#endif  // GENEO_ERRORS_H_
