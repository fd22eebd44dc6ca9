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

// Brute-force reference solvers used to validate the closed forms and the
// matching-based clustering: a simplex grid search for the slave problem, a
// dense linear solve of the active constraint equalities, permutation search
// for assignments and exhaustive enumeration of clusterings.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/clustering.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/slave.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma::oracle {

struct GridResult {
  bool empty = true;
  std::vector<double> omega;
  double utility = -std::numeric_limits<double>::infinity();  // bits/s/Hz
  double sumrate = 0.0;                                       // bits/s
  std::size_t points = 0;  // feasible grid points visited
};

// Exhaustive search over omega_1..omega_{K-1} on multiples of h * varpi, with
// omega_K = varpi - S_{K-1}, so the grid resolution is relative to the power
// share. A point is kept when every QoS and PDSC slack is >= -tol (default
// tol = h * varpi). Prefixes that already violate a constraint of
// the members fixed so far are pruned; each member's constraints only involve
// S_{i-1}, omega_i and T_i = varpi - S_i, which are known at that depth.
inline GridResult grid_slave(const SlaveInput& in, double h,
                             std::optional<double> tolerance = std::nullopt) {
  check_slave_input(in);
  const std::size_t k = in.size();
  if (k > 4) throw DomainError("grid_slave supports K <= 4");
  if (!(h > 0.0 && h <= 0.01)) throw DomainError("grid_slave needs 0 < h <= 0.01");
  const double step = h * in.varpi;
  const double tol = tolerance.value_or(step);
  GridResult best;
  std::vector<double> omega(k, 0.0);

  const auto member_ok = [&](std::size_t i, double below) {
    const double after = in.varpi - below - omega[i];
    const double qos =
        omega[i] - (in.q[i] - 1.0) * (below + in.eps[i] * after + in.rho[i]);
    if (qos < -tol) return false;
    if (i > 0 && omega[i] - below - in.delta[i] < -tol) return false;
    return true;
  };

  // PDSC of member j gives S_{j-1} <= (S_j + tol) / 2, so with S_K = varpi
  // every prefix sum is bounded from above.
  std::vector<double> bound(k + 1, in.varpi);
  for (std::size_t j = k; j >= 2; --j) bound[j - 1] = 0.5 * (bound[j] + tol);

  std::function<void(std::size_t, double)> walk = [&](std::size_t i, double below) {
    if (i + 1 == k) {
      omega[i] = in.varpi - below;
      if (omega[i] < 0.0 || !member_ok(i, below)) return;
      ++best.points;
      const double u = spectral_efficiency(in, omega);
      if (u > best.utility) {
        best.utility = u;
        best.omega = omega;
        best.empty = false;
      }
      return;
    }
    const auto steps =
        step > 0.0 ? static_cast<long>(std::floor((in.varpi - below) / step + 1e-9)) : 0L;
    for (long n = 0; n <= steps; ++n) {
      omega[i] = static_cast<double>(n) * step;
      if (below + omega[i] > bound[i + 1]) break;
      if (!member_ok(i, below)) continue;
      walk(i + 1, below + omega[i]);
    }
  };
  walk(0, 0.0);
  if (!best.empty) best.sumrate = in.theta * in.bandwidth_hz * best.utility;
  return best;
}

// Solution of {sum w = varpi} together with the equality form of the binding
// constraint of every member i >= 2. nullopt if the system is singular.
inline std::optional<std::vector<double>> linear_system_omega(const SlaveInput& in,
                                                              const ActiveSet& as) {
  check_slave_input(in);
  const auto k = static_cast<Eigen::Index>(in.size());
  if (as.cluster_size() != in.size()) {
    throw DomainError("active set does not match the cluster size");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  a.row(0).setOnes();
  b(0) = in.varpi;
  for (Eigen::Index m = 1; m < k; ++m) {
    const auto u = static_cast<std::size_t>(m);
    a(m, m) = 1.0;
    if (as.qos_tight(u)) {
      const double g = in.q[u] - 1.0;
      for (Eigen::Index j = 0; j < m; ++j) a(m, j) = -g;
      for (Eigen::Index j = m + 1; j < k; ++j) a(m, j) = -g * in.eps[u];
      b(m) = g * in.rho[u];
    } else {
      for (Eigen::Index j = 0; j < m; ++j) a(m, j) = -1.0;
      b(m) = in.delta[u];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd x = lu.solve(b);
  return std::vector<double>(x.data(), x.data() + k);
}

// Best total weight over all injective row -> column maps.
inline double brute_force_assignment(const WeightMatrix& w, Sense sense) {
  if (w.empty()) return 0.0;
  const bool transpose = w.rows() > w.cols();
  const std::size_t small = transpose ? w.cols() : w.rows();
  const std::size_t large = transpose ? w.rows() : w.cols();
  const auto at = [&](std::size_t i, std::size_t j) {
    return transpose ? w(j, i) : w(i, j);
  };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = sense == Sense::maximize ? -std::numeric_limits<double>::infinity()
                                         : std::numeric_limits<double>::infinity();
  // Enumerate all permutations of the large side; the first `small` entries
  // form the injective map (duplicates of the same map are harmless).
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) total += at(i, perm[i]);
    best = sense == Sense::maximize ? std::max(best, total) : std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Clustering score with equal bandwidth and power shares 1/R_c per cluster
// and intra-cluster powers inversely proportional to the channel gains:
// sum over clusters and members of log2(1 + gamma).
struct EqualShareScore {
  double tx_power_w = 1.0;
  LinkBudget link;
  double eps = 0.0;

  double operator()(std::span<const Cluster> clusters) const {
    if (clusters.empty()) return 0.0;
    const double share = 1.0 / static_cast<double>(clusters.size());
    double score = 0.0;
    for (const auto& c : clusters) {
      const std::size_t k = c.members.size();
      std::vector<double> gains(k), omega(k), e(k, eps);
      double inv_sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        gains[i] = c.members[i].gain;
        inv_sum += 1.0 / gains[i];
      }
      for (std::size_t i = 0; i < k; ++i) omega[i] = share * (1.0 / gains[i]) / inv_sum;
      for (double g : sinr(gains, omega, share, e, tx_power_w, link)) {
        score += std::log2(1.0 + g);
      }
    }
    return score;
  }
};

struct ExhaustiveResult {
  std::vector<Cluster> clusters;
  double score = -std::numeric_limits<double>::infinity();
  std::size_t enumerated = 0;
};

inline constexpr std::size_t kExhaustiveMaxUes = 9;

// Enumerates every partition of `ues` (descending gain) into exactly
// R_c = ceil(U_c / K_c) clusters of at most K_c members and returns the one
// maximizing evaluate(clusters).
template <typename Evaluate>
ExhaustiveResult exhaustive_cf(std::span<const RankedUe> ues, int cluster_size,
                               Evaluate&& evaluate, int bs_id = 0) {
  if (ues.size() > kExhaustiveMaxUes) {
    throw DomainError("exhaustive clustering refuses more than 9 UEs");
  }
  ExhaustiveResult best;
  if (ues.empty()) return best;
  const auto r_c = static_cast<std::size_t>(cluster_count(ues.size(), cluster_size));
  const auto k_c = static_cast<std::size_t>(cluster_size);
  std::vector<Cluster> blocks;
  std::function<void(std::size_t)> place = [&](std::size_t u) {
    if (ues.size() - u < r_c - blocks.size()) return;  // cannot fill all blocks
    if (u == ues.size()) {
      ++best.enumerated;
      const double s = evaluate(std::span<const Cluster>(blocks));
      if (s > best.score) {
        best.score = s;
        best.clusters = blocks;
      }
      return;
    }
    // Indexed access: deeper levels push to `blocks`.
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].members.size() >= k_c) continue;
      blocks[b].members.push_back(ues[u]);
      place(u + 1);
      blocks[b].members.pop_back();
    }
    if (blocks.size() < r_c) {
      blocks.push_back({bs_id, static_cast<int>(blocks.size()), {ues[u]}});
      place(u + 1);
      blocks.pop_back();
    }
  };
  place(0);
  return best;
}

// True when the index rule and the matching-based clustering coincide.
inline bool index_matches_wmm(std::span<const Partition> partitions) {
  return same_cluster_sets(index_clustering(partitions), sequential_wmm(partitions));
}

}  // namespace hetnoma::oracle
