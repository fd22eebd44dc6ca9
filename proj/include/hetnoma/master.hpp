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

// Secondary masters (per-BS cluster power split, projected subgradient) and
// the primary master (network-wide bandwidth split, linearized program).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma {

// Euclidean projection onto {x >= 0, sum x <= cap}.
inline std::vector<double> project_simplex(std::span<const double> v, double cap) {
  if (!(cap > 0.0)) throw DomainError("project_simplex: cap must be positive");
  std::vector<double> x(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = std::max(v[i], 0.0);
    sum += x[i];
  }
  if (sum <= cap) return x;
  // Budget binds: find tau with sum max(v - tau, 0) = cap.
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double t = (prefix - cap) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= t) {
      tau = t;
      break;
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - tau, 0.0);
  return x;
}

// varpi <- [varpi + nu * lambda]_Pi for the clusters of one BS.
inline std::vector<double> secondary_update(std::span<const double> varpi,
                                            std::span<const double> lambdas,
                                            double nu) {
  if (varpi.size() != lambdas.size()) {
    throw DomainError("secondary_update: varpi and lambda sizes differ");
  }
  if (!(nu > 0.0)) throw DomainError("secondary_update: step size must be positive");
  std::vector<double> step(varpi.size());
  for (std::size_t r = 0; r < varpi.size(); ++r) step[r] = varpi[r] + nu * lambdas[r];
  return project_simplex(step, 1.0);
}

// Smallest QoS slack over the members of `cluster` when the powers are held
// at omega and the bandwidth share is theta.
inline double min_qos_slack(const Cluster& cluster, std::span<const double> omega,
                            double theta, const NetworkScenario& sc) {
  const auto in = derive_slave_params(cluster, theta, 0.0, sc);
  double total = 0.0;
  for (double w : omega) total += w;
  double below = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double above = total - below - omega[i];
    const double need = (in.q[i] - 1.0) * (below + in.eps[i] * above + in.rho[i]);
    // Relative slack so the tolerance is independent of the power scale.
    worst = std::min(worst, (omega[i] - need) / std::max(omega[i], 1e-300));
    below += omega[i];
  }
  return worst;
}

struct ThetaMin {
  bool feasible = false;
  double value = 1.0;
  bool monotone = true;  // false if the dense-scan fallback was needed
};

// Minimal bandwidth share at which the cluster still meets every QoS demand
// with its powers fixed. Bisection to 1e-6, with a coarse monotonicity probe;
// if the slack is not monotone the smallest feasible point of a dense scan is
// refined instead. The result never exceeds theta_current when the cluster is
// feasible there.
inline ThetaMin theta_min_qos(const Cluster& cluster, std::span<const double> omega,
                              const NetworkScenario& sc, double floor = 1e-6,
                              double theta_current = 1.0) {
  constexpr double kTol = 1e-9;
  constexpr double kResolution = 1e-6;
  const auto ok = [&](double t) {
    return min_qos_slack(cluster, omega, t, sc) >= -kTol;
  };
  ThetaMin out;
  if (!ok(1.0)) return out;
  out.feasible = true;
  if (ok(floor)) {
    out.value = floor;
    return out;
  }

  constexpr int kProbe = 16;
  double prev = -std::numeric_limits<double>::infinity();
  for (int p = 0; p <= kProbe; ++p) {
    const double t = floor + (1.0 - floor) * p / kProbe;
    const double s = min_qos_slack(cluster, omega, t, sc);
    if (s < prev - 1e-12 * std::max(1.0, std::abs(prev))) out.monotone = false;
    prev = s;
  }

  double lo = floor;
  double hi = 1.0;
  if (!out.monotone) {
    constexpr int kScan = 2000;
    for (int p = 1; p <= kScan; ++p) {
      const double t = floor + (1.0 - floor) * p / kScan;
      if (ok(t)) {
        hi = t;
        lo = floor + (1.0 - floor) * (p - 1) / kScan;
        break;
      }
    }
  }
  while (hi - lo > kResolution) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  out.value = hi;
  if (theta_current < out.value && theta_current >= floor && ok(theta_current)) {
    out.value = theta_current;
  }
  return out;
}

// Linearized bandwidth split: every cluster gets its floor and the residual
// goes to the cluster(s) of largest utility (ties share equally). The result
// is blended with the previous split, theta = (1 - d) theta_prev + d theta_lp,
// and finally lifted back onto the floors if the blend dipped below any.
inline std::vector<double> primary_update(std::span<const double> utilities,
                                          std::span<const double> theta_min,
                                          std::span<const double> theta_prev,
                                          double damping) {
  const std::size_t n = utilities.size();
  if (theta_min.size() != n || theta_prev.size() != n) {
    throw DomainError("primary_update: mismatched vector sizes");
  }
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw DomainError("primary_update: damping must lie in (0, 1]");
  }
  if (n == 0) return {};
  const double floor_sum = std::accumulate(theta_min.begin(), theta_min.end(), 0.0);
  if (floor_sum > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "minimum bandwidth shares sum to " << floor_sum << " > 1";
    throw GlobalInfeasibility(msg.str(),
                              std::vector<double>(theta_min.begin(), theta_min.end()));
  }
  const double residual = std::max(0.0, 1.0 - floor_sum);
  const double best = *std::max_element(utilities.begin(), utilities.end());
  const double tie = 1e-12 * std::max(1.0, std::abs(best));
  std::vector<std::size_t> winners;
  for (std::size_t r = 0; r < n; ++r) {
    if (utilities[r] >= best - tie) winners.push_back(r);
  }
  std::vector<double> lp(theta_min.begin(), theta_min.end());
  for (std::size_t r : winners) lp[r] += residual / static_cast<double>(winners.size());

  std::vector<double> theta(n);
  for (std::size_t r = 0; r < n; ++r) {
    theta[r] = (1.0 - damping) * theta_prev[r] + damping * lp[r];
  }
  double deficit = 0.0;
  double surplus = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (theta[r] < theta_min[r]) {
      deficit += theta_min[r] - theta[r];
      theta[r] = theta_min[r];
    } else {
      surplus += theta[r] - theta_min[r];
    }
  }
  if (deficit > 0.0 && surplus > 0.0) {
    const double shrink = std::min(1.0, deficit / surplus);
    for (std::size_t r = 0; r < n; ++r) {
      theta[r] -= shrink * (theta[r] - theta_min[r]);
    }
  }
  return theta;
}

inline double linearized_objective(std::span<const double> utilities,
                                   std::span<const double> theta) {
  double s = 0.0;
  for (std::size_t r = 0; r < utilities.size(); ++r) s += utilities[r] * theta[r];
  return s;
}

}  // namespace hetnoma
