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

// Hierarchical distributed power-bandwidth allocation (clustering, slave
// solves, per-BS power subgradient, network-wide bandwidth split), the equal
// power-bandwidth and OMA baselines, and report metrics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/clustering.hpp"
#include "hetnoma/config.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/master.hpp"
#include "hetnoma/slave.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma {

enum class Scheme { noma, oma, equal };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::noma: return "noma";
    case Scheme::oma: return "oma";
    case Scheme::equal: return "equal";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "noma") return Scheme::noma;
  if (s == "oma") return Scheme::oma;
  if (s == "equal") return Scheme::equal;
  throw ConfigError("unknown scheme '" + s + "' (expected noma, oma or equal)");
}

struct ClusterOutcome {
  Cluster cluster;
  double theta = 0.0;
  double varpi = 0.0;
  SlaveSolution solution;
  // Split out of an infeasible NOMA cluster; never rejoins NOMA.
  bool oma_fallback = false;
  // Single-UE cluster whose demand cannot be met: it transmits at full varpi.
  bool qos_unmet = false;
};

struct UeRate {
  int ue_id = 0;
  int bs_id = 0;
  int cluster = 0;  // position in SimulationReport::clusters
  int rank = 0;     // 1 = strongest member
  double sinr = 0.0;
  double rate_bps = 0.0;
  double demand_bps = 0.0;
  bool qos_met = false;
};

struct OuterTrace {
  int k = 0;
  std::vector<double> theta;
  double utility_sum = 0.0;  // sum of cluster spectral efficiencies
  double objective = 0.0;    // sum theta * utility
  double max_violation = 0.0;
  int inner_iterations = 0;
  bool inner_converged = false;
};

struct SimulationReport {
  Scheme scheme = Scheme::noma;
  std::uint64_t scenario_hash = 0;
  SimConfig config;
  std::vector<ClusterOutcome> clusters;
  std::vector<UeRate> rates;
  double sumrate = 0.0;
  int outer_iterations = 0;
  bool outer_converged = false;
  std::vector<OuterTrace> trace;
  bool globally_infeasible = false;
  std::string diagnosis;
  double wall_seconds = 0.0;

  std::vector<int> fallback_ues() const {
    std::vector<int> ids;
    for (const auto& c : clusters) {
      if (c.oma_fallback) ids.push_back(c.cluster.members.front().id);
    }
    return ids;
  }
  bool all_inner_converged() const {
    for (const auto& t : trace) {
      if (!t.inner_converged) return false;
    }
    return true;
  }
  int max_inner_iterations() const {
    int m = 0;
    for (const auto& t : trace) m = std::max(m, t.inner_iterations);
    return m;
  }
};

// Rate that counts only if the UE's demand is met (outage otherwise).
inline double effective_rate(const UeRate& r) { return r.qos_met ? r.rate_bps : 0.0; }

inline double effective_sumrate(const SimulationReport& rep) {
  double s = 0.0;
  for (const auto& r : rep.rates) s += effective_rate(r);
  return s;
}

// Per-UE SINR and capacity of a final allocation evaluated on `sc` (which may
// differ from the scenario the allocation was computed on, e.g. in ICI).
inline std::vector<UeRate> evaluate_allocation(std::span<const ClusterOutcome> clusters,
                                               const NetworkScenario& sc) {
  std::vector<UeRate> rates;
  const LinkBudget link = sc.link();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& co = clusters[c];
    const auto& m = co.cluster.members;
    std::vector<double> gains, eps;
    for (const auto& ue : m) {
      gains.push_back(sc.gain(co.cluster.bs_id, ue.id));
      eps.push_back(sc.ues.at(static_cast<std::size_t>(ue.id)).sic_error);
    }
    const auto gamma = sinr(gains, co.solution.omega, co.theta, eps,
                            sc.tx_power(co.cluster.bs_id), link);
    for (std::size_t i = 0; i < m.size(); ++i) {
      UeRate r;
      r.ue_id = m[i].id;
      r.bs_id = co.cluster.bs_id;
      r.cluster = static_cast<int>(c);
      r.rank = static_cast<int>(i) + 1;
      r.sinr = gamma[i];
      r.rate_bps = capacity(gamma[i], co.theta, sc.bandwidth_hz);
      r.demand_bps = sc.ues.at(static_cast<std::size_t>(m[i].id)).qos_demand_bps;
      r.qos_met = r.rate_bps >= r.demand_bps * (1.0 - 1e-9);
      rates.push_back(r);
    }
  }
  std::sort(rates.begin(), rates.end(),
            [](const UeRate& a, const UeRate& b) { return a.ue_id < b.ue_id; });
  return rates;
}

namespace detail {

inline std::vector<ClusterOutcome> form_clusters(const NetworkScenario& sc,
                                                 int cluster_size,
                                                 ClusteringMethod method) {
  std::vector<ClusterOutcome> out;
  for (const auto& bs : sc.bss) {
    auto clusters = cluster_bs(sc, bs.id, cluster_size, method);
    const double varpi = clusters.empty() ? 0.0 : 1.0 / static_cast<double>(clusters.size());
    for (auto& c : clusters) {
      ClusterOutcome co;
      co.cluster = std::move(c);
      co.varpi = varpi;
      out.push_back(std::move(co));
    }
  }
  const double theta = out.empty() ? 0.0 : 1.0 / static_cast<double>(out.size());
  for (auto& co : out) co.theta = theta;
  return out;
}

// Single UE transmitting at its whole power share although its demand is not
// met. lambda is the marginal utility of the share.
inline SlaveSolution best_effort(const SlaveInput& in) {
  SlaveSolution s;
  s.omega = {in.varpi};
  s.lambda = 1.0 / (in.varpi + in.rho[0]);
  s.mu = {0.0};
  s.varphi = {0.0};
  s.feasible = false;
  s.utility = spectral_efficiency(in, s.omega);
  s.sumrate = in.theta * in.bandwidth_hz * s.utility;
  return s;
}

// Solves every cluster at its current (theta, varpi). Infeasible NOMA
// clusters are replaced in place by singleton OMA clusters sharing the
// cluster's theta and varpi equally; infeasible singletons run best effort.
inline void solve_all(std::vector<ClusterOutcome>& cs, const NetworkScenario& sc) {
  bool split = true;
  while (split) {
    split = false;
    std::vector<ClusterOutcome> next;
    next.reserve(cs.size());
    for (auto& co : cs) {
      const auto in = derive_slave_params(co.cluster, co.theta, co.varpi, sc);
      auto sol = solve(in);
      if (sol.feasible) {
        co.solution = std::move(sol);
        co.qos_unmet = false;
        next.push_back(std::move(co));
      } else if (co.cluster.size() == 1) {
        co.solution = best_effort(in);
        co.qos_unmet = true;
        next.push_back(std::move(co));
      } else {
        split = true;
        const double k = static_cast<double>(co.cluster.size());
        for (const auto& ue : co.cluster.members) {
          ClusterOutcome single;
          single.cluster = {co.cluster.bs_id, co.cluster.index, {ue}};
          single.theta = co.theta / k;
          single.varpi = co.varpi / k;
          single.oma_fallback = true;
          next.push_back(std::move(single));
        }
      }
    }
    // A split leaves new singletons unsolved; the next pass solves them.
    cs = std::move(next);
  }
}

// Per-BS projected subgradient step; returns the largest varpi change.
inline double update_powers(std::vector<ClusterOutcome>& cs, int num_bs, double nu) {
  double delta = 0.0;
  for (int b = 0; b < num_bs; ++b) {
    std::vector<std::size_t> idx;
    std::vector<double> varpi, lambda;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].cluster.bs_id != b) continue;
      idx.push_back(i);
      varpi.push_back(cs[i].varpi);
      lambda.push_back(cs[i].solution.lambda);
    }
    if (idx.empty()) continue;
    const auto upd = secondary_update(varpi, lambda, nu);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      delta = std::max(delta, std::abs(upd[j] - varpi[j]));
      cs[idx[j]].varpi = upd[j];
    }
  }
  return delta;
}

inline double max_violation(std::span<const ClusterOutcome> cs, int num_bs) {
  double theta_sum = 0.0;
  std::vector<double> varpi_sum(static_cast<std::size_t>(num_bs), 0.0);
  for (const auto& co : cs) {
    theta_sum += co.theta;
    varpi_sum[static_cast<std::size_t>(co.cluster.bs_id)] += co.varpi;
  }
  double v = std::max(0.0, theta_sum - 1.0);
  for (double s : varpi_sum) v = std::max(v, s - 1.0);
  return v;
}

inline void finish(SimulationReport& rep, const NetworkScenario& sc,
                   std::chrono::steady_clock::time_point start) {
  rep.rates = evaluate_allocation(rep.clusters, sc);
  rep.sumrate = 0.0;
  for (const auto& r : rep.rates) rep.sumrate += r.rate_bps;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// Full hierarchical loop. `cluster_size` overrides config.cluster_size (the
// OMA scheme passes 1).
inline SimulationReport run_algorithm1(const NetworkScenario& sc, const SimConfig& cfg,
                                       std::optional<int> cluster_size = std::nullopt) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int k_c = cluster_size.value_or(cfg.cluster_size);
  const int num_bs = static_cast<int>(sc.bss.size());
  SimulationReport rep;
  rep.scheme = k_c == 1 ? Scheme::oma : Scheme::noma;
  rep.scenario_hash = scenario_hash(sc);
  rep.config = cfg;
  auto cs = detail::form_clusters(sc, k_c, cfg.clustering);

  for (int k = 0; k < cfg.outer_max_iters && !cs.empty(); ++k) {
    OuterTrace tr;
    tr.k = k;
    for (int t = 0; t < cfg.inner_max_iters; ++t) {
      detail::solve_all(cs, sc);
      const double delta = detail::update_powers(cs, num_bs, cfg.step_size);
      tr.inner_iterations = t + 1;
      if (delta < cfg.inner_tol) {
        tr.inner_converged = true;
        break;
      }
    }
    detail::solve_all(cs, sc);

    std::vector<double> util, floors, theta_prev;
    for (const auto& co : cs) {
      util.push_back(co.solution.utility);
      theta_prev.push_back(co.theta);
      const auto tm = theta_min_qos(co.cluster, co.solution.omega, sc,
                                    cfg.theta_floor, co.theta);
      floors.push_back(tm.feasible ? tm.value : cfg.theta_floor);
    }
    tr.utility_sum = 0.0;
    for (double u : util) tr.utility_sum += u;
    tr.objective = linearized_objective(util, theta_prev);

    std::vector<double> theta;
    try {
      theta = primary_update(util, floors, theta_prev, cfg.damping);
    } catch (const GlobalInfeasibility& e) {
      rep.globally_infeasible = true;
      rep.diagnosis = e.what();
      tr.theta = theta_prev;
      tr.max_violation = detail::max_violation(cs, num_bs);
      rep.trace.push_back(std::move(tr));
      rep.outer_iterations = k + 1;
      break;
    }
    double dtheta = 0.0;
    for (std::size_t r = 0; r < cs.size(); ++r) {
      dtheta = std::max(dtheta, std::abs(theta[r] - cs[r].theta));
      cs[r].theta = theta[r];
    }
    tr.theta = theta;
    tr.max_violation = detail::max_violation(cs, num_bs);
    rep.trace.push_back(std::move(tr));
    rep.outer_iterations = k + 1;
    if (dtheta < cfg.outer_tol) {
      rep.outer_converged = true;
      break;
    }
  }
  detail::solve_all(cs, sc);
  rep.clusters = std::move(cs);
  detail::finish(rep, sc, start);
  return rep;
}

inline SimulationReport run_oma(const NetworkScenario& sc, const SimConfig& cfg) {
  return run_algorithm1(sc, cfg, 1);
}

// Uniform bandwidth over all clusters, uniform power over the clusters of
// each BS, one slave solve per cluster.
inline SimulationReport run_equal_pba(const NetworkScenario& sc, const SimConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SimulationReport rep;
  rep.scheme = Scheme::equal;
  rep.scenario_hash = scenario_hash(sc);
  rep.config = cfg;
  auto cs = detail::form_clusters(sc, cfg.cluster_size, cfg.clustering);
  detail::solve_all(cs, sc);
  rep.outer_converged = true;
  rep.clusters = std::move(cs);
  detail::finish(rep, sc, start);
  return rep;
}

inline SimulationReport run_scheme(const NetworkScenario& sc, const SimConfig& cfg,
                                   Scheme scheme) {
  switch (scheme) {
    case Scheme::noma: return run_algorithm1(sc, cfg);
    case Scheme::oma: return run_oma(sc, cfg);
    case Scheme::equal: return run_equal_pba(sc, cfg);
  }
  throw ConfigError("unknown scheme");
}

// Allocation computed as if there were no inter-cell interference, then
// evaluated on the true scenario.
inline SimulationReport run_ici_agnostic(const NetworkScenario& sc, const SimConfig& cfg,
                                         Scheme scheme) {
  NetworkScenario blind = sc;
  blind.ici_power_w = 0.0;
  auto rep = run_scheme(blind, cfg, scheme);
  rep.scenario_hash = scenario_hash(sc);
  rep.rates = evaluate_allocation(rep.clusters, sc);
  rep.sumrate = 0.0;
  for (const auto& r : rep.rates) rep.sumrate += r.rate_bps;
  return rep;
}

struct Summary {
  double sumrate = 0.0;
  double effective_sumrate = 0.0;
  std::optional<double> normalized;  // sumrate / baseline sumrate
  std::vector<double> quantile_levels{0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<double> rate_quantiles;
  int qos_satisfied = 0;
  int num_ues = 0;
  int num_clusters = 0;
  int oma_fallbacks = 0;
  long long messages = 0;  // outer iterations x clusters
};

inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Summary metrics(const SimulationReport& rep,
                       const SimulationReport* baseline = nullptr) {
  Summary s;
  s.sumrate = rep.sumrate;
  s.effective_sumrate = effective_sumrate(rep);
  if (baseline != nullptr) {
    if (baseline->scenario_hash != rep.scenario_hash) {
      throw DomainError("baseline report belongs to a different scenario");
    }
    s.normalized = baseline->sumrate > 0.0 ? rep.sumrate / baseline->sumrate : 0.0;
  }
  std::vector<double> r;
  for (const auto& u : rep.rates) {
    r.push_back(u.rate_bps);
    if (u.qos_met) ++s.qos_satisfied;
  }
  for (double p : s.quantile_levels) s.rate_quantiles.push_back(quantile(r, p));
  s.num_ues = static_cast<int>(rep.rates.size());
  s.num_clusters = static_cast<int>(rep.clusters.size());
  for (const auto& c : rep.clusters) s.oma_fallbacks += c.oma_fallback ? 1 : 0;
  s.messages = static_cast<long long>(rep.outer_iterations) * s.num_clusters;
  return s;
}

}  // namespace hetnoma
