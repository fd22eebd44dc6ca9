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

// File formats of the command-line tool. Every CSV starts with a comment line
// carrying the config hash and seed; JSON documents carry the same two keys.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hetnoma/config.hpp"
#include "hetnoma/orchestrator.hpp"
#include "hetnoma/sweep.hpp"
#include "json.hpp"

namespace hetnoma {

inline std::string provenance_line(const SimConfig& cfg, std::uint64_t seed) {
  return "# hetnoma config_hash=" + hex64(config_hash(cfg)) +
         " seed=" + std::to_string(seed);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_doubles(std::span<const double> v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

// `base_config` is the configuration the run was requested with (its hash is
// what the provenance line reports).
inline nlohmann::json report_to_json(const SimulationReport& rep,
                                     const SimConfig& base_config,
                                     std::uint64_t seed) {
  const auto s = metrics(rep);
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& co : rep.clusters) {
    std::vector<int> ids;
    for (const auto& m : co.cluster.members) ids.push_back(m.id);
    clusters.push_back({{"bs_id", co.cluster.bs_id},
                        {"index", co.cluster.index},
                        {"members", ids},
                        {"theta", co.theta},
                        {"varpi", co.varpi},
                        {"omega", co.solution.omega},
                        {"lambda", co.solution.lambda},
                        {"active_set", co.solution.active_set.label()},
                        {"feasible", co.solution.feasible},
                        {"oma_fallback", co.oma_fallback},
                        {"qos_unmet", co.qos_unmet},
                        {"utility", co.solution.utility}});
  }
  return {{"config_hash", hex64(config_hash(base_config))},
          {"seed", seed},
          {"scheme", to_string(rep.scheme)},
          {"scenario_hash", hex64(rep.scenario_hash)},
          {"sumrate_bps", rep.sumrate},
          {"effective_sumrate_bps", s.effective_sumrate},
          {"qos_satisfied", s.qos_satisfied},
          {"num_ues", s.num_ues},
          {"num_clusters", s.num_clusters},
          {"oma_fallbacks", s.oma_fallbacks},
          {"fallback_ues", rep.fallback_ues()},
          {"messages", s.messages},
          {"rate_quantiles",
           {{"levels", s.quantile_levels}, {"rates_bps", s.rate_quantiles}}},
          {"outer_iterations", rep.outer_iterations},
          {"outer_converged", rep.outer_converged},
          {"inner_converged", rep.all_inner_converged()},
          {"max_inner_iterations", rep.max_inner_iterations()},
          {"globally_infeasible", rep.globally_infeasible},
          {"diagnosis", rep.diagnosis},
          {"clusters", clusters},
          {"wall_seconds", rep.wall_seconds}};
}

inline void write_rates_csv(std::ostream& os, const SimulationReport& rep,
                            const SimConfig& base_config, std::uint64_t seed) {
  os << provenance_line(base_config, seed) << '\n';
  os << "ue_id,bs_id,cluster,rank,sinr,rate_bps,demand_bps,qos_met\n";
  for (const auto& r : rep.rates) {
    os << r.ue_id << ',' << r.bs_id << ',' << r.cluster << ',' << r.rank << ','
       << format_double(r.sinr) << ',' << format_double(r.rate_bps) << ','
       << format_double(r.demand_bps) << ',' << (r.qos_met ? 1 : 0) << '\n';
  }
}

inline void write_trace_csv(std::ostream& os, const SimulationReport& rep,
                            const SimConfig& base_config, std::uint64_t seed) {
  os << provenance_line(base_config, seed) << '\n';
  os << "k,inner_iterations,inner_converged,utility_sum,objective,max_violation,theta\n";
  for (const auto& t : rep.trace) {
    os << t.k << ',' << t.inner_iterations << ',' << (t.inner_converged ? 1 : 0)
       << ',' << format_double(t.utility_sum) << ',' << format_double(t.objective)
       << ',' << format_double(t.max_violation) << ',' << join_doubles(t.theta)
       << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                            SweepAxis axis, const SimConfig& base_config) {
  os << provenance_line(base_config, base_config.seed) << '\n';
  os << "axis,value,seed,scheme,variant,sumrate_bps,effective_sumrate_bps,"
        "qos_satisfied,outer_iterations,converged\n";
  for (const auto& r : rows) {
    os << to_string(axis) << ',' << format_double(r.value) << ','
       << (r.seed ? std::to_string(*r.seed) : std::string("mean")) << ','
       << to_string(r.scheme) << ',' << r.variant << ','
       << format_double(r.sumrate) << ',' << format_double(r.effective_sumrate)
       << ',' << format_double(r.qos_satisfied) << ','
       << format_double(r.outer_iterations) << ',' << format_double(r.converged)
       << '\n';
  }
}

}  // namespace hetnoma
