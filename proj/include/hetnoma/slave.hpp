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

// Per-cluster power allocation with imperfect SIC. The optimum is found by
// enumerating which of the QoS or PDSC constraint binds for every member
// i >= 2, computing the candidate powers in closed form, certifying each
// candidate with the primal and dual KKT conditions and keeping the
// certified candidate of highest sumrate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/types.hpp"

namespace hetnoma {

inline constexpr std::size_t kMaxClusterSize = 8;
inline constexpr double kPrimalTol = 1e-9;
inline constexpr double kDualFloor = -1e-12;

enum class Tight : std::uint8_t { qos, pdsc };

// One flag per member i = 2..K (flags[0] belongs to member 2).
struct ActiveSet {
  std::vector<Tight> flags;

  std::size_t cluster_size() const { return flags.size() + 1; }
  // `member` is the 0-based SIC rank, must be >= 1.
  Tight at(std::size_t member) const { return flags.at(member - 1); }
  bool qos_tight(std::size_t member) const { return at(member) == Tight::qos; }

  std::string label() const {
    if (flags.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (i) s += ' ';
      s += (flags[i] == Tight::qos ? "mu" : "phi") + std::to_string(i + 2);
    }
    return s;
  }

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;
  friend auto operator<=>(const ActiveSet& a, const ActiveSet& b) {
    return a.flags <=> b.flags;
  }
};

struct Multipliers {
  double lambda = 0.0;
  std::vector<double> mu;      // mu[0] (member 1) is always 0
  std::vector<double> varphi;  // varphi[0] unused, kept 0
};

struct SlaveSolution {
  std::vector<double> omega;
  double lambda = 0.0;
  std::vector<double> mu;
  std::vector<double> varphi;
  ActiveSet active_set;
  bool feasible = false;
  double utility = 0.0;  // sum log2(1 + gamma), bits/s/Hz
  double sumrate = 0.0;  // theta * B * utility, bits/s
};

inline void check_cluster_size(std::size_t k) {
  if (k == 0) throw DomainError("cluster must have at least one member");
  if (k > kMaxClusterSize) {
    throw DomainError("cluster size " + std::to_string(k) +
                      " exceeds the supported maximum of " +
                      std::to_string(kMaxClusterSize));
  }
}

// Binary counting over members 2..K, member 2 least significant; a 0 bit is
// qos_tight.
inline std::vector<ActiveSet> enumerate_active_sets(std::size_t k) {
  check_cluster_size(k);
  const std::size_t count = std::size_t{1} << (k - 1);
  std::vector<ActiveSet> sets(count);
  for (std::size_t code = 0; code < count; ++code) {
    sets[code].flags.resize(k - 1);
    for (std::size_t b = 0; b + 1 < k; ++b) {
      sets[code].flags[b] = ((code >> b) & 1U) ? Tight::pdsc : Tight::qos;
    }
  }
  return sets;
}

namespace detail {

inline void check_active(const SlaveInput& in, const ActiveSet& as) {
  check_slave_input(in);
  check_cluster_size(in.size());
  if (as.cluster_size() != in.size()) {
    throw DomainError("active set does not match the cluster size");
  }
}

// Growth factor and offset of the backward cumulative-power recursion
// S_{i-1} = (S_i - c_i) / f_i in the error-free case.
inline double factor(const SlaveInput& in, const ActiveSet& as, std::size_t m) {
  return as.qos_tight(m) ? in.q[m] : 2.0;
}
inline double offset(const SlaveInput& in, const ActiveSet& as, std::size_t k) {
  return as.qos_tight(k) ? (in.q[k] - 1.0) * in.rho[k] : in.delta[k];
}

}  // namespace detail

// Error-free closed form. With S_j the power of the j strongest members and
// f, c as above:
//   S_j = varpi / prod_{m>j} f_m - sum_{k>j} c_k / prod_{j<m<=k} f_m
//   w_i = (q_i - 1)(S_{i-1} + rho_i)   if i is QoS-tight
//   w_i = S_{i-1} + Delta_i            if i is PDSC-tight
//   w_1 = S_1
inline std::vector<double> perfect_omega(const SlaveInput& in, const ActiveSet& as) {
  detail::check_active(in, as);
  const std::size_t k = in.size();
  std::vector<double> s(k + 1, 0.0);  // s[j] = S_j, 1-based
  s[k] = in.varpi;
  for (std::size_t j = 1; j < k; ++j) {
    double prod = 1.0;
    double sub = 0.0;
    for (std::size_t m = j + 1; m <= k; ++m) {
      prod *= detail::factor(in, as, m - 1);
      sub += detail::offset(in, as, m - 1) / prod;
    }
    s[j] = in.varpi / prod - sub;
  }
  std::vector<double> omega(k);
  omega[0] = s[1];
  for (std::size_t i = 2; i <= k; ++i) {
    const std::size_t m = i - 1;
    omega[m] = as.qos_tight(m) ? (in.q[m] - 1.0) * (s[i - 1] + in.rho[m])
                               : s[i - 1] + in.delta[m];
  }
  return omega;
}

// Residual-interference correction psi, i.e. the exact candidate minus the
// error-free one. Writing D_i for the shift of S_i and T_i^0 = varpi - S_i^0
// for the error-free power of the members weaker than i:
//   D_K = 0,  D_{i-1} = a_i D_i - b_i T_i^0
//   QoS-tight:  a_i = (1 + (q_i - 1) eps_i) / q_i,  b_i = (q_i - 1) eps_i / q_i
//   PDSC-tight: a_i = 1/2, b_i = 0
//   psi_1 = D_1, psi_i = D_i - D_{i-1}.
// All terms carry at least one eps factor, so psi vanishes for eps = 0.
inline std::vector<double> psi(const SlaveInput& in, const ActiveSet& as) {
  const auto w0 = perfect_omega(in, as);
  const std::size_t k = in.size();
  std::vector<double> s0(k + 1, 0.0);
  for (std::size_t j = 1; j <= k; ++j) s0[j] = s0[j - 1] + w0[j - 1];
  std::vector<double> d(k + 1, 0.0);
  for (std::size_t i = k; i >= 2; --i) {
    const std::size_t m = i - 1;
    if (as.qos_tight(m)) {
      const double qe = (in.q[m] - 1.0) * in.eps[m];
      const double t0 = in.varpi - s0[i];
      d[i - 1] = ((1.0 + qe) * d[i] - qe * t0) / in.q[m];
    } else {
      d[i - 1] = 0.5 * d[i];
    }
  }
  std::vector<double> out(k);
  out[0] = d[1];
  for (std::size_t i = 2; i <= k; ++i) out[i - 1] = d[i] - d[i - 1];
  return out;
}

// Candidate powers of an active set: perfect_omega + psi. `psi_sign` exists
// only as a mutation hook for the verifier; production callers leave it at 1.
inline std::vector<double> closed_form_omega(const SlaveInput& in,
                                             const ActiveSet& as,
                                             double psi_sign = 1.0) {
  if (in.size() == 1) {
    check_slave_input(in);
    return {in.varpi};
  }
  auto omega = perfect_omega(in, as);
  const auto corr = psi(in, as);
  for (std::size_t i = 0; i < omega.size(); ++i) omega[i] += psi_sign * corr[i];
  return omega;
}

// Literal table expressions for K = 2 and K = 3 (with psi added), kept as an
// independent evaluation path of the general closed form.
inline std::vector<double> table_omega(const SlaveInput& in, const ActiveSet& as) {
  detail::check_active(in, as);
  const std::size_t k = in.size();
  if (k < 2 || k > 3) throw DomainError("table_omega covers K = 2 and K = 3 only");
  const double w = in.varpi;
  const auto ps = psi(in, as);
  const double q2 = in.q[1], r2 = in.rho[1], d2 = in.delta[1];
  std::vector<double> o(k);
  if (k == 2) {
    if (as.qos_tight(1)) {
      o[0] = w / q2 - r2 * (q2 - 1) / q2;
      o[1] = w * (q2 - 1) / q2 + r2 * (q2 - 1) / q2;
    } else {
      o[0] = w / 2 - d2 / 2;
      o[1] = w / 2 + d2 / 2;
    }
  } else {
    const double q3 = in.q[2], r3 = in.rho[2], d3 = in.delta[2];
    const bool qos2 = as.qos_tight(1);
    const bool qos3 = as.qos_tight(2);
    if (qos2 && qos3) {
      o[0] = w / (q2 * q3) - r2 * (q2 - 1) / q2 - r3 * (q3 - 1) / (q2 * q3);
      o[1] = w * (q2 - 1) / (q2 * q3) + r2 * (q2 - 1) / q2 -
             r3 * (q2 - 1) * (q3 - 1) / (q2 * q3);
      o[2] = w * (q3 - 1) / q3 + r3 * (q3 - 1) / q3;
    } else if (qos2) {
      o[0] = w / (2 * q2) - r2 * (q2 - 1) / q2 - d3 / (2 * q2);
      o[1] = w * (q2 - 1) / (2 * q2) + r2 * (q2 - 1) / q2 - d3 * (q2 - 1) / (2 * q2);
      o[2] = w / 2 + d3 / 2;
    } else if (qos3) {
      o[0] = w / (2 * q3) - d2 / 2 - r3 * (q3 - 1) / (2 * q3);
      o[1] = w / (2 * q3) + d2 / 2 - r3 * (q3 - 1) / (2 * q3);
      o[2] = w * (q3 - 1) / q3 + r3 * (q3 - 1) / q3;
    } else {
      o[0] = w / 4 - d2 / 2 - d3 / 4;
      o[1] = w / 4 + d2 / 2 - d3 / 4;
      o[2] = w / 2 + d3 / 2;
    }
  }
  for (std::size_t i = 0; i < k; ++i) o[i] += ps[i];
  return o;
}

// Constraint slacks at omega.
//   qos[i]  = w_i - (q_i - 1)(S_{i-1} + eps_i T_i + rho_i)
//   pdsc[i] = w_i - S_{i-1} - Delta_i   (i >= 1; pdsc[0] unused)
struct Slacks {
  double budget = 0.0;  // varpi - sum w
  std::vector<double> qos;
  std::vector<double> pdsc;
};

inline Slacks constraint_slacks(const SlaveInput& in, const std::vector<double>& omega) {
  const std::size_t k = in.size();
  Slacks s;
  s.qos.assign(k, 0.0);
  s.pdsc.assign(k, 0.0);
  double total = 0.0;
  for (double w : omega) total += w;
  s.budget = in.varpi - total;
  double below = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double above = total - below - omega[i];
    s.qos[i] = omega[i] - (in.q[i] - 1.0) * (below + in.eps[i] * above + in.rho[i]);
    if (i > 0) s.pdsc[i] = omega[i] - below - in.delta[i];
    below += omega[i];
  }
  return s;
}

struct PrimalCheck {
  bool ok = false;
  std::string reason;  // empty when ok
};

// Primal part of the KKT certificate: non-negative powers, full budget use,
// and strict satisfaction of every constraint the active set leaves inactive
// (QoS of member 1; the non-binding one of QoS/PDSC for i >= 2).
inline PrimalCheck check_primal_detail(const SlaveInput& in,
                                       const std::vector<double>& omega,
                                       const ActiveSet& as) {
  const std::size_t k = in.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(omega[i])) return {false, "w" + std::to_string(i + 1) + " not finite"};
    if (omega[i] < 0.0) return {false, "w" + std::to_string(i + 1) + " < 0"};
  }
  const auto s = constraint_slacks(in, omega);
  if (std::abs(s.budget) > kPrimalTol) return {false, "budget not exhausted"};
  if (!(s.qos[0] > -kPrimalTol)) return {false, "qos1 violated"};
  for (std::size_t i = 1; i < k; ++i) {
    if (as.qos_tight(i)) {
      if (!(s.pdsc[i] > -kPrimalTol)) {
        return {false, "pdsc" + std::to_string(i + 1) + " violated"};
      }
    } else if (!(s.qos[i] > -kPrimalTol)) {
      return {false, "qos" + std::to_string(i + 1) + " violated"};
    }
  }
  return {true, {}};
}

inline bool check_primal(const SlaveInput& in, const std::vector<double>& omega,
                         const ActiveSet& as) {
  return check_primal_detail(in, omega, as).ok;
}

// First three stationarity terms (without the theta*B/ln 2 prefactor):
//   kappa_i = 1/N_i - sum_{m<i} eps_m w_m / (N_m D_m) - sum_{m>i} w_m / (N_m D_m)
// with D_m = S_{m-1} + eps_m T_m + rho_m and N_m = D_m + w_m.
inline std::vector<double> kappa(const SlaveInput& in, const std::vector<double>& omega) {
  const std::size_t k = in.size();
  double total = 0.0;
  for (double w : omega) total += w;
  std::vector<double> n(k), inv_nd(k);
  double below = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    const double above = total - below - omega[m];
    const double d = below + in.eps[m] * above + in.rho[m];
    n[m] = d + omega[m];
    inv_nd[m] = omega[m] / (n[m] * d);
    below += omega[m];
  }
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    double v = 1.0 / n[i];
    for (std::size_t m = 0; m < i; ++m) v -= in.eps[m] * inv_nd[m];
    for (std::size_t m = i + 1; m < k; ++m) v -= inv_nd[m];
    out[i] = v;
  }
  return out;
}

// kappa_{i-1} - kappa_i for i = 2..K; non-negative at certified optima.
inline std::vector<double> kappa_gaps(const SlaveInput& in,
                                      const std::vector<double>& omega) {
  const auto kp = kappa(in, omega);
  std::vector<double> g;
  for (std::size_t i = 1; i < kp.size(); ++i) g.push_back(kp[i - 1] - kp[i]);
  return g;
}

// Dual variables from stationarity. Differencing the conditions of members
// i-1 and i gives
//   X_i = kappa_{i-1} - kappa_i + phi_{i-1} + mu_{i-1} (1 + eps_{i-1}(q_{i-1} - 1))
//   phi_i = X_i / 2 (PDSC-tight)   or   mu_i = X_i / q_i (QoS-tight),
// and the condition of member K yields
//   lambda = kappa_K + phi_K + mu_K - sum_{j<K} mu_j eps_j (q_j - 1).
inline Multipliers multipliers(const SlaveInput& in, const std::vector<double>& omega,
                               const ActiveSet& as) {
  const std::size_t k = in.size();
  const auto kp = kappa(in, omega);
  Multipliers out;
  out.mu.assign(k, 0.0);
  out.varphi.assign(k, 0.0);
  for (std::size_t i = 1; i < k; ++i) {
    const double x = kp[i - 1] - kp[i] + out.varphi[i - 1] +
                     out.mu[i - 1] * (1.0 + in.eps[i - 1] * (in.q[i - 1] - 1.0));
    if (as.qos_tight(i)) {
      out.mu[i] = x / in.q[i];
    } else {
      out.varphi[i] = x / 2.0;
    }
  }
  double lambda = kp[k - 1] + out.varphi[k - 1] + out.mu[k - 1];
  for (std::size_t j = 0; j + 1 < k; ++j) {
    lambda -= out.mu[j] * in.eps[j] * (in.q[j] - 1.0);
  }
  out.lambda = lambda;
  return out;
}

inline bool dual_feasible(const Multipliers& m) {
  if (!(m.lambda >= kDualFloor)) return false;
  for (double v : m.mu) {
    if (!(v >= kDualFloor)) return false;
  }
  for (double v : m.varphi) {
    if (!(v >= kDualFloor)) return false;
  }
  return true;
}

// Largest stationarity violation over all members, relative to max(1, |kappa|).
inline double stationarity_residual(const SlaveInput& in,
                                    const std::vector<double>& omega,
                                    const Multipliers& m) {
  const std::size_t k = in.size();
  const auto kp = kappa(in, omega);
  double scale = 1.0;
  for (double v : kp) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double r = kp[i] - m.lambda + m.varphi[i] + m.mu[i];
    for (std::size_t j = i + 1; j < k; ++j) r -= m.varphi[j];
    for (std::size_t j = 0; j < i; ++j) r -= m.mu[j] * in.eps[j] * (in.q[j] - 1.0);
    for (std::size_t j = i + 1; j < k; ++j) r -= m.mu[j] * (in.q[j] - 1.0);
    worst = std::max(worst, std::abs(r) / scale);
  }
  return worst;
}

// Sum of log2(1 + gamma_i) at omega.
inline double spectral_efficiency(const SlaveInput& in, const std::vector<double>& omega) {
  const auto gamma = sinr(omega, in.eps, in.rho);
  double u = 0.0;
  for (double g : gamma) u += std::log2(1.0 + g);
  return u;
}

struct CandidateReport {
  ActiveSet active;
  std::vector<double> omega;
  PrimalCheck primal;
  Multipliers mult;
  bool dual_ok = false;
  double utility = 0.0;
};

namespace detail {

inline CandidateReport evaluate_candidate(const SlaveInput& in, const ActiveSet& as) {
  CandidateReport c;
  c.active = as;
  c.omega = closed_form_omega(in, as);
  c.primal = check_primal_detail(in, c.omega, as);
  if (!c.primal.ok) return c;
  c.mult = multipliers(in, c.omega, as);
  c.dual_ok = dual_feasible(c.mult);
  if (!c.dual_ok) c.primal.reason = "negative multiplier";
  c.utility = spectral_efficiency(in, c.omega);
  return c;
}

}  // namespace detail

inline std::vector<CandidateReport> enumerate_candidates(const SlaveInput& in) {
  check_slave_input(in);
  std::vector<CandidateReport> out;
  for (const auto& as : enumerate_active_sets(in.size())) {
    out.push_back(detail::evaluate_candidate(in, as));
  }
  return out;
}

// Certified candidate of highest sumrate; ties go to the lexicographically
// smallest active set. Returns feasible = false when no candidate passes.
inline SlaveSolution solve(const SlaveInput& in) {
  const auto cands = enumerate_candidates(in);
  const CandidateReport* best = nullptr;
  for (const auto& c : cands) {
    if (!c.primal.ok || !c.dual_ok) continue;
    if (best == nullptr) {
      best = &c;
      continue;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(best->utility));
    if (c.utility > best->utility + tol ||
        (std::abs(c.utility - best->utility) <= tol && c.active < best->active)) {
      best = &c;
    }
  }
  SlaveSolution sol;
  if (best == nullptr) {
    sol.active_set.flags.assign(in.size() - 1, Tight::qos);
    return sol;
  }
  sol.omega = best->omega;
  sol.lambda = best->mult.lambda;
  sol.mu = best->mult.mu;
  sol.varphi = best->mult.varphi;
  sol.active_set = best->active;
  sol.feasible = true;
  sol.utility = best->utility;
  sol.sumrate = in.theta * in.bandwidth_hz * best->utility;
  return sol;
}

// One CSV row per candidate active set.
inline void write_candidates_csv(std::ostream& os,
                                 const std::vector<CandidateReport>& cands) {
  os << "case,active_set,omega,primal_ok,dual_ok,reason,lambda,mu,varphi,utility\n";
  const auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ';';
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", v[i]);
      s += buf;
    }
    return s;
  };
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const auto& r = cands[c];
    os << c << ',' << r.active.label() << ',' << join(r.omega) << ','
       << r.primal.ok << ',' << r.dual_ok << ',' << r.primal.reason << ','
       << r.mult.lambda << ',' << join(r.mult.mu) << ',' << join(r.mult.varphi)
       << ',' << r.utility << '\n';
  }
}

}  // namespace hetnoma
