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

// Parameter sweeps: Cartesian product of axis values and seeds, one scenario
// per point, every scheme evaluated on the same scenario.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hetnoma/channel.hpp"
#include "hetnoma/config.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/orchestrator.hpp"

namespace hetnoma {

enum class SweepAxis { epsilon, p_delta, S, U, beta, K, ici_db };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::epsilon: return "epsilon";
    case SweepAxis::p_delta: return "p_delta";
    case SweepAxis::S: return "S";
    case SweepAxis::U: return "U";
    case SweepAxis::beta: return "beta";
    case SweepAxis::K: return "K";
    case SweepAxis::ici_db: return "ici_db";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  for (auto a : {SweepAxis::epsilon, SweepAxis::p_delta, SweepAxis::S, SweepAxis::U,
                 SweepAxis::beta, SweepAxis::K, SweepAxis::ici_db}) {
    if (s == to_string(a)) return a;
  }
  throw ConfigError("unknown sweep axis '" + s +
                    "' (expected epsilon, p_delta, S, U, beta, K or ici_db)");
}

inline int integral_axis_value(SweepAxis axis, double v) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) {
    throw ConfigError(std::string("sweep axis ") + to_string(axis) +
                      " needs integer values");
  }
  return static_cast<int>(r);
}

inline SimConfig apply_axis(SimConfig c, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::epsilon: c.sic_error = v; break;
    case SweepAxis::p_delta: c.p_delta_dbm = v; break;
    case SweepAxis::S: c.num_sbs = integral_axis_value(axis, v); break;
    case SweepAxis::U: c.num_ues = integral_axis_value(axis, v); break;
    case SweepAxis::beta: c.bias = v; break;
    case SweepAxis::K: c.cluster_size = integral_axis_value(axis, v); break;
    case SweepAxis::ici_db: c.ici_db = v; break;
  }
  c.validate();
  return c;
}

struct SweepRow {
  double value = 0.0;
  std::optional<std::uint64_t> seed;  // nullopt on the seed-averaged rows
  Scheme scheme = Scheme::noma;
  std::string variant;  // "aware" / "agnostic" on the ici_db axis
  double sumrate = 0.0;
  double effective_sumrate = 0.0;
  double qos_satisfied = 0.0;
  double outer_iterations = 0.0;
  double converged = 0.0;  // fraction of runs with both loops converged
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::epsilon;
  std::vector<double> values;
  int seeds = 1;
  std::vector<Scheme> schemes{Scheme::noma, Scheme::oma, Scheme::equal};
};

inline bool converged(const SimulationReport& r) {
  return r.outer_converged && r.all_inner_converged() && !r.globally_infeasible;
}

// Seeds run from base.seed to base.seed + seeds - 1. Rows are grouped per
// axis value: per-seed rows first, then one averaged row per scheme/variant.
namespace detail {

// All scheme runs of one (value, seed) point.
inline std::vector<SweepRow> run_point(const SimConfig& cfg, const SweepSpec& spec,
                                       double value, std::uint64_t seed) {
  std::vector<SweepRow> point;
  const auto sc = generate_scenario(cfg, seed);
  const auto record = [&](const SimulationReport& rep, Scheme scheme,
                          const std::string& variant) {
    SweepRow r;
    r.value = value;
    r.seed = seed;
    r.scheme = scheme;
    r.variant = variant;
    r.sumrate = rep.sumrate;
    r.effective_sumrate = effective_sumrate(rep);
    r.qos_satisfied = metrics(rep).qos_satisfied;
    r.outer_iterations = rep.outer_iterations;
    r.converged = converged(rep) ? 1.0 : 0.0;
    point.push_back(r);
  };
  for (Scheme scheme : spec.schemes) {
    if (spec.axis == SweepAxis::ici_db) {
      record(run_scheme(sc, cfg, scheme), scheme, "aware");
      record(run_ici_agnostic(sc, cfg, scheme), scheme, "agnostic");
    } else {
      record(run_scheme(sc, cfg, scheme), scheme, "");
    }
  }
  return point;
}

// Seed-averaged rows, one per (scheme, variant) in first-seen order.
inline std::vector<SweepRow> average_rows(const std::vector<SweepRow>& point,
                                          double value) {
  std::map<std::pair<int, std::string>, std::pair<SweepRow, int>> acc;
  std::vector<std::pair<int, std::string>> order;
  for (const auto& r : point) {
    const auto key = std::make_pair(static_cast<int>(r.scheme), r.variant);
    auto [it, fresh] = acc.try_emplace(key, SweepRow{}, 0);
    if (fresh) {
      order.push_back(key);
      it->second.first.value = value;
      it->second.first.scheme = r.scheme;
      it->second.first.variant = r.variant;
    }
    auto& m = it->second.first;
    m.sumrate += r.sumrate;
    m.effective_sumrate += r.effective_sumrate;
    m.qos_satisfied += r.qos_satisfied;
    m.outer_iterations += r.outer_iterations;
    m.converged += r.converged;
    ++it->second.second;
  }
  std::vector<SweepRow> out;
  for (const auto& key : order) {
    auto [m, n] = acc.at(key);
    const double d = static_cast<double>(n);
    m.sumrate /= d;
    m.effective_sumrate /= d;
    m.qos_satisfied /= d;
    m.outer_iterations /= d;
    m.converged /= d;
    out.push_back(m);
  }
  return out;
}

}  // namespace detail

// Runs every (value, seed) point on a pool of `threads` workers (0 picks the
// hardware concurrency). Seeds are base.seed .. base.seed + seeds - 1. Output
// order is fixed: per value, the per-seed rows followed by the mean rows.
inline std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                       unsigned threads = 1) {
  if (spec.seeds < 0) throw ConfigError("sweep seed count must be >= 0");
  std::vector<SimConfig> configs;
  for (double v : spec.values) configs.push_back(apply_axis(base, spec.axis, v));
  const std::size_t seeds = static_cast<std::size_t>(spec.seeds);
  const std::size_t jobs = configs.size() * seeds;
  std::vector<std::vector<SweepRow>> results(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        const std::size_t v = j / seeds;
        results[j] = detail::run_point(configs[v], spec, spec.values[v],
                                       base.seed + j % seeds);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t v = 0; v < configs.size(); ++v) {
    std::vector<SweepRow> point;
    for (std::size_t s = 0; s < seeds; ++s) {
      auto& r = results[v * seeds + s];
      point.insert(point.end(), r.begin(), r.end());
    }
    rows.insert(rows.end(), point.begin(), point.end());
    const auto means = detail::average_rows(point, spec.values[v]);
    rows.insert(rows.end(), means.begin(), means.end());
  }
  return rows;
}

inline const SweepRow* find_mean(const std::vector<SweepRow>& rows, double value,
                                 Scheme scheme, const std::string& variant = "") {
  for (const auto& r : rows) {
    if (!r.seed && r.value == value && r.scheme == scheme && r.variant == variant) {
      return &r;
    }
  }
  return nullptr;
}

}  // namespace hetnoma
