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

// Randomized instance generators and the verification suite behind the
// `verify` command: closed form against the dense linear solve, slave solve
// against the grid search, KKT certificates, the index/matching clustering
// equivalence and the exhaustive clustering benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/clustering.hpp"
#include "hetnoma/config.hpp"
#include "hetnoma/oracle.hpp"
#include "hetnoma/slave.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma::oracle {

// Composite gains of `count` UEs dropped uniformly in a cell, descending.
// Macro cells span the deployment area, small cells a 100 m radius.
inline std::vector<double> random_gains(std::mt19937_64& rng, std::size_t count,
                                        bool macro, const SimConfig& cfg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> shadow(0.0, cfg.shadow_std_db);
  const double d_max =
      macro ? 0.5 * std::hypot(cfg.area_width_m, cfg.area_height_m) : 100.0;
  const auto params = ChannelParams::from_config(cfg);
  std::vector<double> gains(count);
  for (auto& g : gains) {
    const double d = 10.0 + unit(rng) * (d_max - 10.0);
    g = composite_gain(params, d, shadow(rng));
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  return gains;
}

// Slave instance with magnitudes taken from the configured network: BS power,
// path loss and shadowing, theta in [0.01, 0.2], varpi in [0.02, 1], demands
// uniform on [0, 2 * qos_mean] and per-member eps uniform on [0, eps_max].
inline SlaveInput random_slave_input(std::mt19937_64& rng, std::size_t k,
                                     double eps_max, const SimConfig& cfg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool macro = unit(rng) < 0.5;
  const double p = macro ? cfg.macro_power_w() : cfg.small_power_w();
  const auto gains = random_gains(rng, k, macro, cfg);
  const LinkBudget link{cfg.bandwidth_hz, cfg.noise_psd_w_hz(), cfg.ici_power_w()};
  SlaveInput in;
  in.theta = 0.01 + 0.19 * unit(rng);
  in.varpi = 0.02 + 0.98 * unit(rng);
  in.bandwidth_hz = cfg.bandwidth_hz;
  for (double g : gains) {
    const double demand = unit(rng) * 2.0 * cfg.qos_mean_bps;
    in.rho.push_back(normalized_noise(p, g, in.theta, link));
    in.q.push_back(std::exp2(demand / (cfg.bandwidth_hz * in.theta)));
    in.delta.push_back(cfg.p_delta_w() / (p * g));
    in.eps.push_back(unit(rng) * eps_max);
  }
  return in;
}

// Redraws until the slave problem has a certified solution.
inline std::optional<SlaveInput> random_feasible_slave_input(std::mt19937_64& rng,
                                                             std::size_t k,
                                                             double eps_max,
                                                             const SimConfig& cfg,
                                                             int attempts = 10000) {
  for (int a = 0; a < attempts; ++a) {
    auto in = random_slave_input(rng, k, eps_max, cfg);
    if (solve(in).feasible) return in;
  }
  return std::nullopt;
}

struct OmegaComparison {
  std::size_t compared = 0;  // active sets whose exact solution is feasible
  double max_abs_diff = 0.0;
};

// Closed form against the dense solve on every active set whose exact
// solution passes the primal check. Feasibility is judged on the oracle's
// powers so a faulty closed form cannot hide by failing its own check.
inline OmegaComparison compare_closed_form(const SlaveInput& in, double psi_sign = 1.0) {
  OmegaComparison out;
  for (const auto& as : enumerate_active_sets(in.size())) {
    const auto exact = linear_system_omega(in, as);
    if (!exact || !check_primal(in, *exact, as)) continue;
    const auto cf = closed_form_omega(in, as, psi_sign);
    ++out.compared;
    for (std::size_t i = 0; i < cf.size(); ++i) {
      out.max_abs_diff = std::max(out.max_abs_diff, std::abs(cf[i] - (*exact)[i]));
    }
  }
  return out;
}

struct KktCertificate {
  bool ok = false;
  std::string reason;
  double budget_residual = 0.0;        // |sum w - varpi|
  double min_inactive_slack = 0.0;     // over the non-binding constraints
  double min_multiplier = 0.0;         // over lambda, mu, varphi
  double min_kappa_gap = 0.0;          // over kappa_{i-1} - kappa_i
};

// Full re-verification of a solution returned as feasible.
inline KktCertificate certify(const SlaveInput& in, const SlaveSolution& sol) {
  KktCertificate c;
  if (!sol.feasible) {
    c.reason = "solution not feasible";
    return c;
  }
  const std::size_t k = in.size();
  const auto s = constraint_slacks(in, sol.omega);
  c.budget_residual = std::abs(s.budget);
  c.min_inactive_slack = s.qos[0];
  for (std::size_t i = 1; i < k; ++i) {
    c.min_inactive_slack = std::min(
        c.min_inactive_slack, sol.active_set.qos_tight(i) ? s.pdsc[i] : s.qos[i]);
  }
  c.min_multiplier = sol.lambda;
  for (double v : sol.mu) c.min_multiplier = std::min(c.min_multiplier, v);
  for (double v : sol.varphi) c.min_multiplier = std::min(c.min_multiplier, v);
  c.min_kappa_gap = 0.0;
  for (double g : kappa_gaps(in, sol.omega)) c.min_kappa_gap = std::min(c.min_kappa_gap, g);

  if (c.budget_residual > kPrimalTol) {
    c.reason = "budget residual";
  } else if (!(c.min_inactive_slack > 0.0)) {
    c.reason = "inactive constraint not strictly satisfied";
  } else if (!(c.min_multiplier >= kDualFloor)) {
    c.reason = "negative multiplier";
  } else if (!(c.min_kappa_gap >= -kPrimalTol)) {
    c.reason = "kappa not non-increasing";
  } else {
    c.ok = true;
  }
  return c;
}

// Level partitions of one BS with `u_c` random UEs (ids 0..u_c-1).
inline std::vector<Partition> random_partitions(std::mt19937_64& rng, std::size_t u_c,
                                                int k_c, const SimConfig& cfg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto gains = random_gains(rng, u_c, unit(rng) < 0.5, cfg);
  std::vector<RankedUe> ues(u_c);
  for (std::size_t u = 0; u < u_c; ++u) ues[u] = {static_cast<int>(u), gains[u]};
  return partition_ues(ues, k_c);
}

struct ClusteringComparison {
  double wmm_score = 0.0;
  double exhaustive_score = 0.0;
  double wmm_seconds = 0.0;
  std::size_t enumerated = 0;
};

// Equal-share score of the matching-based clustering against the exhaustive
// optimum on one random macro-cell instance.
inline ClusteringComparison compare_clustering(std::mt19937_64& rng, std::size_t u_c,
                                               int k_c, const SimConfig& cfg) {
  const auto levels = random_partitions(rng, u_c, k_c, cfg);
  std::vector<RankedUe> ues;
  for (const auto& l : levels) ues.insert(ues.end(), l.members.begin(), l.members.end());
  const LinkBudget link{cfg.bandwidth_hz, cfg.noise_psd_w_hz(), cfg.ici_power_w()};
  const EqualShareScore score{cfg.macro_power_w(), link, cfg.sic_error};
  ClusteringComparison out;
  const auto start = std::chrono::steady_clock::now();
  const auto wmm = sequential_wmm(levels);
  out.wmm_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.wmm_score = score(wmm);
  const auto best = exhaustive_cf(ues, k_c, score);
  out.exhaustive_score = best.score;
  out.enumerated = best.enumerated;
  return out;
}

struct VerifyLine {
  int instance = 0;
  std::string check;
  double closed_form_sumrate = 0.0;
  double oracle_sumrate = 0.0;
  double max_abs_diff = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  int instances = 100;
  std::uint64_t seed = 1;
  double eps_max = 1e-3;
  double grid_step = 1e-3;
  double omega_tol = 1e-10;
  double sumrate_slack = 0.01;  // relative
  double psi_sign = 1.0;        // -1 injects a sign error into psi
};

// One block of checks per instance; slave checks cycle K over {2, 3, 4}.
inline std::vector<VerifyLine> run_verification(const SimConfig& cfg,
                                                const VerifyOptions& opt) {
  std::vector<VerifyLine> lines;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> u_pick(3, 60), k_pick(2, 7), small_u(3, 9);
  for (int n = 0; n < opt.instances; ++n) {
    const std::size_t k = 2 + static_cast<std::size_t>(n % 3);
    const auto in = random_feasible_slave_input(rng, k, opt.eps_max, cfg);
    if (!in) {
      lines.push_back({n, "instance", 0, 0, 0, false, "no feasible instance drawn"});
      continue;
    }
    const auto sol = solve(*in);

    const auto cmp = compare_closed_form(*in, opt.psi_sign);
    VerifyLine lin{n, "closed_form_vs_linear", sol.sumrate, sol.sumrate,
                   cmp.max_abs_diff, cmp.compared > 0 && cmp.max_abs_diff <= opt.omega_tol,
                   "K=" + std::to_string(k) + " sets=" + std::to_string(cmp.compared)};
    lines.push_back(lin);

    const auto grid = grid_slave(*in, opt.grid_step);
    VerifyLine g{n, "solve_vs_grid", sol.sumrate, grid.sumrate, 0.0, false,
                 "K=" + std::to_string(k)};
    g.pass = grid.empty || sol.sumrate >= grid.sumrate * (1.0 - opt.sumrate_slack);
    if (grid.empty) g.detail += " grid empty";
    lines.push_back(g);

    const auto cert = certify(*in, sol);
    lines.push_back({n, "kkt_certificate", sol.sumrate, sol.sumrate,
                     cert.budget_residual, cert.ok, cert.ok ? "" : cert.reason});

    const auto u_c = static_cast<std::size_t>(u_pick(rng));
    const int k_c = k_pick(rng);
    const auto levels = random_partitions(rng, u_c, k_c, cfg);
    lines.push_back({n, "index_vs_wmm", 0, 0, 0, index_matches_wmm(levels),
                     "U=" + std::to_string(u_c) + " K=" + std::to_string(k_c)});

    const auto cc =
        compare_clustering(rng, static_cast<std::size_t>(small_u(rng)), 3, cfg);
    lines.push_back({n, "exhaustive_vs_wmm", cc.wmm_score, cc.exhaustive_score, 0,
                     cc.exhaustive_score >= cc.wmm_score - 1e-9,
                     "partitions=" + std::to_string(cc.enumerated)});
  }
  return lines;
}

}  // namespace hetnoma::oracle
