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

// Network geometry, composite channel gains, biased UE association and the
// imperfect-SIC SINR / capacity model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hetnoma/config.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/types.hpp"
#include "json.hpp"

namespace hetnoma {

enum class BsKind { macro, small };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct BaseStation {
  int id = 0;
  BsKind kind = BsKind::macro;
  Point position;
  double tx_power_w = 0.0;
};

struct UserEquipment {
  int id = 0;
  Point position;
  double qos_demand_bps = 0.0;
  double sic_error = 0.0;
  // Linear composite gain towards every BS, indexed by BS id.
  std::vector<double> gains;
  int serving_bs = 0;
};

struct ChannelParams {
  double antenna_const = 1.0;
  double pathloss_exp = 3.76;
  double shadow_std_db = 10.0;
  double fading_mean_sq = 1.0;
  double min_distance_m = 1.0;

  static ChannelParams from_config(const SimConfig& c) {
    return {c.antenna_const, c.pathloss_exp, c.shadow_std_db, 1.0,
            c.min_distance_m};
  }
};

// Band-level constants entering the normalized noise term rho.
struct LinkBudget {
  double bandwidth_hz = 0.0;
  double noise_psd_w_hz = 0.0;
  double ici_power_w = 0.0;
};

struct NetworkScenario {
  std::vector<BaseStation> bss;  // bss[0] is the macro BS
  std::vector<UserEquipment> ues;
  double area_width_m = 0.0;
  double area_height_m = 0.0;
  double bandwidth_hz = 0.0;
  double noise_psd_w_hz = 0.0;
  double ici_power_w = 0.0;
  double p_delta_w = 0.0;
  std::uint64_t seed = 0;
  SimConfig config;

  LinkBudget link() const { return {bandwidth_hz, noise_psd_w_hz, ici_power_w}; }

  double gain(int bs, int ue) const {
    return ues.at(static_cast<std::size_t>(ue)).gains.at(
        static_cast<std::size_t>(bs));
  }
  double tx_power(int bs) const {
    return bss.at(static_cast<std::size_t>(bs)).tx_power_w;
  }
  // UEs served by `bs`, ordered by descending serving gain (ties by id).
  std::vector<RankedUe> served_by(int bs) const {
    std::vector<RankedUe> out;
    for (const auto& ue : ues) {
      if (ue.serving_bs == bs) out.push_back({ue.id, gain(bs, ue.id)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedUe& a, const RankedUe& b) {
                       return a.gain > b.gain;
                     });
    return out;
  }
};

// A * d^-eta * 10^(xi/10) * E|h|^2, with d floored at params.min_distance_m.
inline double composite_gain(const ChannelParams& params, double distance_m,
                             double shadow_draw_db) {
  const double d = std::max(distance_m, params.min_distance_m);
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("composite_gain: distance must be positive");
  }
  return params.antenna_const * std::pow(d, -params.pathloss_exp) *
         std::pow(10.0, shadow_draw_db / 10.0) * params.fading_mean_sq;
}

// Biased RSS association: a UE joins its strongest SBS when that SBS's RSS is
// at least `bias` times the macro RSS, otherwise it joins the macro BS.
inline std::vector<int> associate_ues(const NetworkScenario& sc, double bias) {
  std::vector<int> serving(sc.ues.size(), 0);
  for (std::size_t u = 0; u < sc.ues.size(); ++u) {
    const auto& ue = sc.ues[u];
    const double macro_rss = sc.bss[0].tx_power_w * ue.gains[0];
    int best = -1;
    double best_rss = -1.0;
    for (std::size_t b = 1; b < sc.bss.size(); ++b) {
      const double rss = sc.bss[b].tx_power_w * ue.gains[b];
      if (rss > best_rss) {
        best_rss = rss;
        best = static_cast<int>(b);
      }
    }
    serving[u] = (best > 0 && best_rss >= bias * macro_rss) ? best : 0;
  }
  return serving;
}

// Draws BS/UE positions, QoS demands and shadowing from a single seeded
// stream. The draw order (SBS positions, UE positions, demands, shadowing by
// BS then UE) depends only on the geometry counts, so changing e.g. the SIC
// error, bias or cluster size keeps the same layout for a given seed.
inline NetworkScenario generate_scenario(const SimConfig& config,
                                         std::uint64_t seed) {
  config.validate();
  NetworkScenario sc;
  sc.area_width_m = config.area_width_m;
  sc.area_height_m = config.area_height_m;
  sc.bandwidth_hz = config.bandwidth_hz;
  sc.noise_psd_w_hz = config.noise_psd_w_hz();
  sc.ici_power_w = config.ici_power_w();
  sc.p_delta_w = config.p_delta_w();
  sc.seed = seed;
  sc.config = config;
  sc.config.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, config.area_width_m);
  std::uniform_real_distribution<double> uy(0.0, config.area_height_m);

  sc.bss.push_back({0, BsKind::macro,
                    {config.area_width_m / 2.0, config.area_height_m / 2.0},
                    config.macro_power_w()});
  for (int s = 1; s <= config.num_sbs; ++s) {
    const double x = ux(rng);
    const double y = uy(rng);
    sc.bss.push_back({s, BsKind::small, {x, y}, config.small_power_w()});
  }
  sc.ues.resize(static_cast<std::size_t>(config.num_ues));
  for (int u = 0; u < config.num_ues; ++u) {
    auto& ue = sc.ues[static_cast<std::size_t>(u)];
    ue.id = u;
    ue.position.x = ux(rng);
    ue.position.y = uy(rng);
    ue.sic_error = config.sic_error;
  }
  std::uniform_real_distribution<double> demand(0.0, 2.0 * config.qos_mean_bps);
  for (auto& ue : sc.ues) ue.qos_demand_bps = demand(rng);

  const ChannelParams params = ChannelParams::from_config(config);
  std::normal_distribution<double> shadow(0.0, 1.0);
  for (auto& ue : sc.ues) ue.gains.resize(sc.bss.size());
  for (const auto& bs : sc.bss) {
    for (auto& ue : sc.ues) {
      const double xi = config.shadow_std_db * shadow(rng);
      ue.gains[static_cast<std::size_t>(bs.id)] =
          composite_gain(params, distance(bs.position, ue.position), xi);
    }
  }
  const auto serving = associate_ues(sc, config.bias);
  for (std::size_t u = 0; u < sc.ues.size(); ++u) sc.ues[u].serving_bs = serving[u];
  return sc;
}

// (I_ici + N0*B*theta) / (P_c * g)
inline double normalized_noise(double tx_power_w, double gain, double theta,
                               const LinkBudget& link) {
  return (link.ici_power_w + link.noise_psd_w_hz * link.bandwidth_hz * theta) /
         (tx_power_w * gain);
}

// Imperfect-SIC SINR of every cluster member, strongest first:
//   gamma_i = w_i / (sum_{l<i} w_l + eps_i * sum_{k>i} w_k + rho_i)
inline std::vector<double> sinr(std::span<const double> omega,
                                std::span<const double> eps,
                                std::span<const double> rho) {
  const std::size_t k = omega.size();
  if (k == 0) throw DomainError("sinr: empty cluster");
  if (eps.size() != k || rho.size() != k) {
    throw DomainError("sinr: mismatched member vectors");
  }
  double total = 0.0;
  for (double w : omega) total += w;
  std::vector<double> gamma(k);
  double below = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double above = total - below - omega[i];
    gamma[i] = omega[i] / (below + eps[i] * above + rho[i]);
    below += omega[i];
  }
  return gamma;
}

// Same as above, with rho derived from physical gains and the link budget.
inline std::vector<double> sinr(std::span<const double> gains,
                                std::span<const double> omega, double theta,
                                std::span<const double> eps, double tx_power_w,
                                const LinkBudget& link) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("sinr: theta must lie in (0, 1]");
  }
  std::vector<double> rho(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    rho[i] = normalized_noise(tx_power_w, gains[i], theta, link);
  }
  return sinr(omega, eps, rho);
}

// B * theta * log2(1 + gamma), bits/s.
inline double capacity(double gamma, double theta, double bandwidth_hz) {
  return bandwidth_hz * theta * std::log2(1.0 + gamma);
}

inline SlaveInput derive_slave_params(const Cluster& cluster, double theta,
                                      double varpi, const NetworkScenario& sc) {
  if (!(theta > 0.0)) {
    throw DomainError("derive_slave_params: theta must be positive");
  }
  if (cluster.members.empty()) {
    throw DomainError("derive_slave_params: empty cluster");
  }
  std::vector<RankedUe> members = cluster.members;
  std::stable_sort(members.begin(), members.end(),
                   [](const RankedUe& a, const RankedUe& b) {
                     return a.gain > b.gain;
                   });
  const double p = sc.tx_power(cluster.bs_id);
  const LinkBudget link = sc.link();
  SlaveInput in;
  in.varpi = varpi;
  in.theta = theta;
  in.bandwidth_hz = sc.bandwidth_hz;
  for (const auto& m : members) {
    const auto& ue = sc.ues.at(static_cast<std::size_t>(m.id));
    const double g = sc.gain(cluster.bs_id, m.id);
    in.rho.push_back(normalized_noise(p, g, theta, link));
    in.q.push_back(std::exp2(ue.qos_demand_bps / (sc.bandwidth_hz * theta)));
    in.delta.push_back(sc.p_delta_w / (p * g));
    in.eps.push_back(ue.sic_error);
  }
  return in;
}

// ---------------------------------------------------------------------------
// JSON export / import. Gains are written with round-trip precision.

inline void to_json(nlohmann::json& j, const NetworkScenario& sc) {
  nlohmann::json bss = nlohmann::json::array();
  for (const auto& bs : sc.bss) {
    bss.push_back({{"id", bs.id},
                   {"kind", bs.kind == BsKind::macro ? "macro" : "small"},
                   {"x", bs.position.x},
                   {"y", bs.position.y},
                   {"tx_power_w", bs.tx_power_w}});
  }
  nlohmann::json ues = nlohmann::json::array();
  for (const auto& ue : sc.ues) {
    ues.push_back({{"id", ue.id},
                   {"x", ue.position.x},
                   {"y", ue.position.y},
                   {"qos_demand_bps", ue.qos_demand_bps},
                   {"sic_error", ue.sic_error},
                   {"serving_bs", ue.serving_bs},
                   {"gains", ue.gains}});
  }
  j = nlohmann::json{{"area", {sc.area_width_m, sc.area_height_m}},
                     {"bandwidth_hz", sc.bandwidth_hz},
                     {"noise_psd_w_hz", sc.noise_psd_w_hz},
                     {"ici_power_w", sc.ici_power_w},
                     {"p_delta_w", sc.p_delta_w},
                     {"seed", sc.seed},
                     {"config", sc.config},
                     {"base_stations", bss},
                     {"ues", ues}};
}

inline void from_json(const nlohmann::json& j, NetworkScenario& sc) {
  try {
    sc.area_width_m = j.at("area").at(0).get<double>();
    sc.area_height_m = j.at("area").at(1).get<double>();
    sc.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    sc.noise_psd_w_hz = j.at("noise_psd_w_hz").get<double>();
    sc.ici_power_w = j.at("ici_power_w").get<double>();
    sc.p_delta_w = j.at("p_delta_w").get<double>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    sc.config = j.at("config").get<SimConfig>();
    sc.bss.clear();
    for (const auto& b : j.at("base_stations")) {
      BaseStation bs;
      bs.id = b.at("id").get<int>();
      bs.kind = b.at("kind").get<std::string>() == "macro" ? BsKind::macro
                                                           : BsKind::small;
      bs.position = {b.at("x").get<double>(), b.at("y").get<double>()};
      bs.tx_power_w = b.at("tx_power_w").get<double>();
      sc.bss.push_back(bs);
    }
    sc.ues.clear();
    for (const auto& u : j.at("ues")) {
      UserEquipment ue;
      ue.id = u.at("id").get<int>();
      ue.position = {u.at("x").get<double>(), u.at("y").get<double>()};
      ue.qos_demand_bps = u.at("qos_demand_bps").get<double>();
      ue.sic_error = u.at("sic_error").get<double>();
      ue.serving_bs = u.at("serving_bs").get<int>();
      ue.gains = u.at("gains").get<std::vector<double>>();
      sc.ues.push_back(std::move(ue));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scenario document: ") + e.what());
  }
  if (sc.bss.empty() || sc.bss[0].kind != BsKind::macro || sc.bss[0].id != 0) {
    throw ConfigError("scenario must start with the macro BS (id 0)");
  }
  for (std::size_t b = 0; b < sc.bss.size(); ++b) {
    if (sc.bss[b].id != static_cast<int>(b)) {
      throw ConfigError("scenario BS ids must be contiguous from 0");
    }
  }
  for (std::size_t u = 0; u < sc.ues.size(); ++u) {
    const auto& ue = sc.ues[u];
    if (ue.id != static_cast<int>(u)) {
      throw ConfigError("scenario UE ids must be contiguous from 0");
    }
    if (ue.serving_bs < 0 || ue.serving_bs >= static_cast<int>(sc.bss.size())) {
      throw ConfigError("scenario UE refers to an unknown serving BS");
    }
    if (ue.gains.size() != sc.bss.size()) {
      throw ConfigError("scenario UE gain vector does not cover every BS");
    }
  }
}

inline std::uint64_t scenario_hash(const NetworkScenario& sc) {
  return fnv1a64(nlohmann::json(sc).dump());
}

}  // namespace hetnoma
