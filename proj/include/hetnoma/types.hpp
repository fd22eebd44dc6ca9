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

// Value types shared between the channel, clustering, slave and master
// layers.

#include <cstddef>
#include <string>
#include <vector>

#include "hetnoma/error.hpp"

namespace hetnoma {

// A UE together with its composite gain towards its serving BS.
struct RankedUe {
  int id = 0;
  double gain = 0.0;

  friend bool operator==(const RankedUe&, const RankedUe&) = default;
};

// One NOMA cluster of a BS. Members are ordered by descending gain: member 0
// is the strongest UE (decoded last, lowest power), the last member is the
// weakest.
struct Cluster {
  int bs_id = 0;
  int index = 0;
  std::vector<RankedUe> members;

  std::size_t size() const { return members.size(); }
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Normalized data of one slave (per-cluster power allocation) problem.
// Per-member vectors are indexed by SIC rank, strongest first.
//   rho   - (I_ici + N0*B*theta) / (P_c * g), non-decreasing
//   q     - 2^(demand / (B*theta)) >= 1
//   delta - p_delta / (P_c * g), non-decreasing
//   eps   - fractional SIC error in [0, 1]
struct SlaveInput {
  double varpi = 1.0;
  double theta = 1.0;
  double bandwidth_hz = 1.0;
  std::vector<double> rho;
  std::vector<double> q;
  std::vector<double> delta;
  std::vector<double> eps;

  std::size_t size() const { return rho.size(); }
};

inline void check_slave_input(const SlaveInput& in) {
  const std::size_t k = in.rho.size();
  if (k == 0) throw DomainError("slave input has no members");
  if (in.q.size() != k || in.delta.size() != k || in.eps.size() != k) {
    throw DomainError("slave input vectors have mismatched lengths");
  }
  if (!(in.varpi >= 0.0)) throw DomainError("slave input varpi must be >= 0");
}

}  // namespace hetnoma
