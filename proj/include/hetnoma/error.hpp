// Copyright 2026 The hetnoma Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hetnoma {

// Invalid user-supplied configuration (missing field, non-positive size...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition does not hold (zero distance, empty cluster,
// theta = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The sum of per-cluster minimum bandwidth shares exceeds the whole band.
class GlobalInfeasibility : public std::runtime_error {
 public:
  GlobalInfeasibility(const std::string& what, std::vector<double> floors)
      : std::runtime_error(what), floors_(std::move(floors)) {}
  double floor_sum() const {
    double s = 0.0;
    for (double f : floors_) s += f;
    return s;
  }
  // Per-cluster minimum bandwidth shares that triggered the error.
  const std::vector<double>& floors() const { return floors_; }

 private:
  std::vector<double> floors_;
};

}  // namespace hetnoma
