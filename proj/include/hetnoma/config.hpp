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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include "hetnoma/error.hpp"
#include "json.hpp"

namespace hetnoma {

enum class ClusteringMethod { index, wmm };

// Simulation parameters. Defaults reproduce the reference macro/small cell
// setup (500 m x 500 m, 10 SBSs, 100 UEs, K = 5). Power-like quantities are
// stored in the units they are configured in (dBm, dB) and converted once by
// the *_w() accessors.
struct SimConfig {
  double area_width_m = 500.0;
  double area_height_m = 500.0;
  int num_sbs = 10;
  int num_ues = 100;
  double macro_power_dbm = 46.0;
  double small_power_dbm = 30.0;
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_hz = -174.0;
  double pathloss_exp = 3.76;
  double shadow_std_db = 10.0;
  // 128.1 + 37.6 log10(d/km) dB macro path loss written as A d^-3.76 (d in m).
  double antenna_const = 0.0295;
  double min_distance_m = 1.0;
  double bias = 0.3;
  double sic_error = 1e-5;
  double p_delta_dbm = -90.0;
  int cluster_size = 5;
  int max_cluster_size = 8;
  double qos_mean_bps = 1.5e6;
  // Inter-cell interference in dB over the full-band noise power N0*B;
  // nullopt means no ICI.
  std::optional<double> ici_db;
  double step_size = 0.005;
  double damping = 0.5;
  double inner_tol = 1e-5;
  int inner_max_iters = 500;
  double outer_tol = 1e-4;
  int outer_max_iters = 30;
  double theta_floor = 1e-6;
  ClusteringMethod clustering = ClusteringMethod::index;
  std::uint64_t seed = 1;

  double macro_power_w() const { return dbm_to_watts(macro_power_dbm); }
  double small_power_w() const { return dbm_to_watts(small_power_dbm); }
  double noise_psd_w_hz() const { return dbm_to_watts(noise_psd_dbm_hz); }
  double p_delta_w() const { return dbm_to_watts(p_delta_dbm); }
  double noise_power_w() const { return noise_psd_w_hz() * bandwidth_hz; }
  double ici_power_w() const {
    return ici_db ? noise_power_w() * std::pow(10.0, *ici_db / 10.0) : 0.0;
  }

  static double dbm_to_watts(double dbm) {
    return std::pow(10.0, (dbm - 30.0) / 10.0);
  }

  // Throws ConfigError naming the first offending field.
  void validate() const {
    auto fail = [](const char* field, const char* why) {
      throw ConfigError(std::string("config field '") + field + "' " + why);
    };
    if (!(area_width_m > 0.0)) fail("area_width_m", "must be positive");
    if (!(area_height_m > 0.0)) fail("area_height_m", "must be positive");
    if (num_sbs < 0) fail("num_sbs", "must be non-negative");
    if (num_ues <= 0) fail("num_ues", "must be positive");
    if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz", "must be positive");
    if (!(pathloss_exp > 0.0)) fail("pathloss_exp", "must be positive");
    if (!(shadow_std_db >= 0.0)) fail("shadow_std_db", "must be non-negative");
    if (!(antenna_const > 0.0)) fail("antenna_const", "must be positive");
    if (!(min_distance_m > 0.0)) fail("min_distance_m", "must be positive");
    if (!(bias > 0.0 && bias <= 1.0)) fail("bias", "must lie in (0, 1]");
    if (!(sic_error >= 0.0 && sic_error <= 1.0)) {
      fail("sic_error", "must lie in [0, 1]");
    }
    if (cluster_size < 1) fail("cluster_size", "must be at least 1");
    if (max_cluster_size < 1 || max_cluster_size > 8) {
      fail("max_cluster_size", "must lie in [1, 8]");
    }
    if (cluster_size > max_cluster_size) {
      fail("cluster_size", "exceeds max_cluster_size");
    }
    if (!(qos_mean_bps >= 0.0)) fail("qos_mean_bps", "must be non-negative");
    if (!(step_size > 0.0)) fail("step_size", "must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) fail("damping", "must lie in (0, 1]");
    if (!(inner_tol > 0.0)) fail("inner_tol", "must be positive");
    if (!(outer_tol > 0.0)) fail("outer_tol", "must be positive");
    if (inner_max_iters < 1) fail("inner_max_iters", "must be at least 1");
    if (outer_max_iters < 1) fail("outer_max_iters", "must be at least 1");
    if (!(theta_floor > 0.0 && theta_floor < 1.0)) {
      fail("theta_floor", "must lie in (0, 1)");
    }
  }
};

inline const char* to_string(ClusteringMethod m) {
  return m == ClusteringMethod::index ? "index" : "wmm";
}

inline void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{
      {"area_width_m", c.area_width_m},
      {"area_height_m", c.area_height_m},
      {"num_sbs", c.num_sbs},
      {"num_ues", c.num_ues},
      {"macro_power_dbm", c.macro_power_dbm},
      {"small_power_dbm", c.small_power_dbm},
      {"bandwidth_hz", c.bandwidth_hz},
      {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
      {"pathloss_exp", c.pathloss_exp},
      {"shadow_std_db", c.shadow_std_db},
      {"antenna_const", c.antenna_const},
      {"min_distance_m", c.min_distance_m},
      {"bias", c.bias},
      {"sic_error", c.sic_error},
      {"p_delta_dbm", c.p_delta_dbm},
      {"cluster_size", c.cluster_size},
      {"max_cluster_size", c.max_cluster_size},
      {"qos_mean_bps", c.qos_mean_bps},
      {"ici_db", c.ici_db ? nlohmann::json(*c.ici_db) : nlohmann::json(nullptr)},
      {"step_size", c.step_size},
      {"damping", c.damping},
      {"inner_tol", c.inner_tol},
      {"inner_max_iters", c.inner_max_iters},
      {"outer_tol", c.outer_tol},
      {"outer_max_iters", c.outer_max_iters},
      {"theta_floor", c.theta_floor},
      {"clustering", to_string(c.clustering)},
      {"seed", c.seed},
  };
}

namespace detail {

template <class T>
T require(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw ConfigError(std::string("config is missing field '") + field + "'");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + field +
                      "' has the wrong type");
  }
}

}  // namespace detail

// Every field is required; a missing or mistyped field raises ConfigError
// naming it.
inline void from_json(const nlohmann::json& j, SimConfig& c) {
  using detail::require;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  c.area_width_m = require<double>(j, "area_width_m");
  c.area_height_m = require<double>(j, "area_height_m");
  c.num_sbs = require<int>(j, "num_sbs");
  c.num_ues = require<int>(j, "num_ues");
  c.macro_power_dbm = require<double>(j, "macro_power_dbm");
  c.small_power_dbm = require<double>(j, "small_power_dbm");
  c.bandwidth_hz = require<double>(j, "bandwidth_hz");
  c.noise_psd_dbm_hz = require<double>(j, "noise_psd_dbm_hz");
  c.pathloss_exp = require<double>(j, "pathloss_exp");
  c.shadow_std_db = require<double>(j, "shadow_std_db");
  c.antenna_const = require<double>(j, "antenna_const");
  c.min_distance_m = require<double>(j, "min_distance_m");
  c.bias = require<double>(j, "bias");
  c.sic_error = require<double>(j, "sic_error");
  c.p_delta_dbm = require<double>(j, "p_delta_dbm");
  c.cluster_size = require<int>(j, "cluster_size");
  c.max_cluster_size = require<int>(j, "max_cluster_size");
  c.qos_mean_bps = require<double>(j, "qos_mean_bps");
  if (!j.contains("ici_db")) {
    throw ConfigError("config is missing field 'ici_db'");
  }
  c.ici_db = j.at("ici_db").is_null()
                 ? std::nullopt
                 : std::optional<double>(require<double>(j, "ici_db"));
  c.step_size = require<double>(j, "step_size");
  c.damping = require<double>(j, "damping");
  c.inner_tol = require<double>(j, "inner_tol");
  c.inner_max_iters = require<int>(j, "inner_max_iters");
  c.outer_tol = require<double>(j, "outer_tol");
  c.outer_max_iters = require<int>(j, "outer_max_iters");
  c.theta_floor = require<double>(j, "theta_floor");
  const auto method = require<std::string>(j, "clustering");
  if (method == "index") {
    c.clustering = ClusteringMethod::index;
  } else if (method == "wmm") {
    c.clustering = ClusteringMethod::wmm;
  } else {
    throw ConfigError("config field 'clustering' must be \"index\" or \"wmm\"");
  }
  c.seed = require<std::uint64_t>(j, "seed");
}

// Reads, parses and validates a config file. Any failure is a ConfigError.
inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  SimConfig c = j.get<SimConfig>();
  c.validate();
  return c;
}

// 64-bit FNV-1a; used for config and scenario fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const SimConfig& c) {
  return fnv1a64(nlohmann::json(c).dump());
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x0000000000000000";
  for (int i = 17; i >= 2; --i, v >>= 4) out[i] = kDigits[v & 0xF];
  return out;
}

}  // namespace hetnoma
