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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hetnoma/orchestrator.hpp"
#include "hetnoma/report_io.hpp"
#include "hetnoma/sweep.hpp"

namespace hetnoma {
namespace {

// Macro-only scenario with hand-picked gains and demands.
NetworkScenario macro_only(const std::vector<double>& gains, double demand_bps, double eps) {
  NetworkScenario sc;
  sc.area_width_m = sc.area_height_m = 100.0;
  sc.bandwidth_hz = 1e6;
  sc.noise_psd_w_hz = 1e-19;
  sc.p_delta_w = 1e-15;
  sc.bss.push_back({0, BsKind::macro, {50, 50}, 1.0});
  for (std::size_t u = 0; u < gains.size(); ++u) {
    UserEquipment ue;
    ue.id = static_cast<int>(u);
    ue.qos_demand_bps = demand_bps;
    ue.sic_error = eps;
    ue.gains = {gains[u]};
    sc.ues.push_back(ue);
  }
  return sc;
}

SimConfig small_config(int k) {
  SimConfig cfg;
  cfg.cluster_size = k;
  cfg.sic_error = 0.0;
  return cfg;
}

TEST(Algorithm1, TwoUesOneClusterMatchesHandComputation) {
  const auto sc = macro_only({1e-10, 1e-12}, 0.0, 0.0);
  const auto rep = run_algorithm1(sc, small_config(2));
  ASSERT_EQ(rep.clusters.size(), 1u);
  const auto& co = rep.clusters[0];
  EXPECT_DOUBLE_EQ(co.theta, 1.0);
  EXPECT_DOUBLE_EQ(co.varpi, 1.0);
  ASSERT_TRUE(co.solution.feasible);
  // Zero demand: q = 1, so only the PDSC case survives.
  const double n0b = 1e-19 * 1e6;
  const double rho1 = n0b / 1e-10, rho2 = n0b / 1e-12, d2 = 1e-15 / 1e-12;
  const double w1 = (1.0 - d2) / 2.0, w2 = (1.0 + d2) / 2.0;
  EXPECT_EQ(co.solution.active_set.flags, std::vector<Tight>{Tight::pdsc});
  EXPECT_NEAR(co.solution.omega[0], w1, 1e-12);
  EXPECT_NEAR(co.solution.omega[1], w2, 1e-12);
  const double hand = 1e6 * (std::log2(1.0 + w1 / rho1) + std::log2(1.0 + w2 / (w1 + rho2)));
  EXPECT_NEAR(rep.sumrate, hand, 1e-6 * hand);
  EXPECT_TRUE(rep.outer_converged);
}

TEST(Algorithm1, SumrateIsSumOfRecomputedRates) {
  SimConfig cfg;
  cfg.num_ues = 30;
  cfg.num_sbs = 3;
  const auto sc = generate_scenario(cfg, 5);
  const auto rep = run_algorithm1(sc, cfg);
  double total = 0.0;
  for (const auto& r : rep.rates) total += r.rate_bps;
  EXPECT_DOUBLE_EQ(rep.sumrate, total);
  const auto again = evaluate_allocation(rep.clusters, sc);
  ASSERT_EQ(again.size(), rep.rates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_DOUBLE_EQ(again[i].rate_bps, rep.rates[i].rate_bps);
  }
  EXPECT_EQ(rep.rates.size(), 30u);
}

TEST(Algorithm1, EndStateIsFeasible) {
  SimConfig cfg;
  cfg.num_ues = 40;
  cfg.num_sbs = 4;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto sc = generate_scenario(cfg, seed);
    const auto rep = run_algorithm1(sc, cfg);
    EXPECT_LE(rep.outer_iterations, cfg.outer_max_iters);
    EXPECT_LE(rep.max_inner_iterations(), cfg.inner_max_iters);
    double theta = 0.0;
    std::vector<double> varpi(sc.bss.size(), 0.0);
    for (const auto& co : rep.clusters) {
      theta += co.theta;
      varpi[static_cast<std::size_t>(co.cluster.bs_id)] += co.varpi;
      EXPECT_GE(co.theta, 0.0);
      EXPECT_GE(co.varpi, 0.0);
      if (co.oma_fallback || co.qos_unmet) continue;
      ASSERT_TRUE(co.solution.feasible);
      const auto in = derive_slave_params(co.cluster, co.theta, co.varpi, sc);
      EXPECT_TRUE(check_primal(in, co.solution.omega, co.solution.active_set));
      EXPECT_TRUE(dual_feasible(multipliers(in, co.solution.omega, co.solution.active_set)));
    }
    EXPECT_LE(theta, 1.0 + 1e-9);
    for (double v : varpi) EXPECT_LE(v, 1.0 + 1e-9);
  }
}

TEST(Algorithm1, Deterministic) {
  SimConfig cfg;
  cfg.num_ues = 25;
  cfg.num_sbs = 2;
  const auto sc = generate_scenario(cfg, 9);
  const auto a = run_algorithm1(sc, cfg);
  const auto b = run_algorithm1(sc, cfg);
  auto ja = report_to_json(a, cfg, 9);
  auto jb = report_to_json(b, cfg, 9);
  ja.erase("wall_seconds");
  jb.erase("wall_seconds");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Algorithm1, UnitClusterSizeIsOma) {
  SimConfig cfg;
  cfg.num_ues = 20;
  cfg.num_sbs = 2;
  cfg.cluster_size = 1;
  const auto sc = generate_scenario(cfg, 2);
  const auto noma = run_algorithm1(sc, cfg);
  const auto oma = run_oma(sc, cfg);
  EXPECT_DOUBLE_EQ(noma.sumrate, oma.sumrate);
  EXPECT_EQ(oma.scheme, Scheme::oma);
  for (const auto& co : oma.clusters) EXPECT_EQ(co.cluster.size(), 1u);
}

TEST(Oma, SingleUeGetsEverything) {
  const auto sc = macro_only({1e-11}, 0.0, 0.0);
  const auto rep = run_oma(sc, small_config(1));
  ASSERT_EQ(rep.clusters.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.clusters[0].theta, 1.0);
  EXPECT_DOUBLE_EQ(rep.clusters[0].varpi, 1.0);
  const double rho = 1e-19 * 1e6 / 1e-11;
  EXPECT_NEAR(rep.sumrate, 1e6 * std::log2(1.0 + 1.0 / rho), 1e-6);
}

TEST(Oma, SymmetricUesShareBandwidthEqually) {
  const auto sc = macro_only({1e-11, 1e-11, 1e-11, 1e-11}, 0.0, 0.0);
  const auto rep = run_oma(sc, small_config(1));
  ASSERT_EQ(rep.clusters.size(), 4u);
  for (const auto& co : rep.clusters) {
    EXPECT_NEAR(co.theta, 0.25, 1e-12);
    EXPECT_NEAR(co.varpi, 0.25, 1e-12);
  }
}

TEST(EqualPba, IdenticalClustersGetIdenticalShares) {
  const auto sc = macro_only({4e-11, 4e-11, 1e-11, 1e-11}, 1e5, 1e-5);
  const auto rep = run_equal_pba(sc, small_config(2));
  ASSERT_EQ(rep.clusters.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.clusters[0].varpi, rep.clusters[1].varpi);
  EXPECT_DOUBLE_EQ(rep.clusters[0].theta, 0.5);
  EXPECT_DOUBLE_EQ(rep.clusters[0].solution.sumrate, rep.clusters[1].solution.sumrate);
}

TEST(EqualPba, SingleClusterCoincidesWithAlgorithm1) {
  const auto sc = macro_only({1e-10, 3e-11, 1e-12}, 1e5, 1e-5);
  const auto cfg = small_config(3);
  const auto eq = run_equal_pba(sc, cfg);
  const auto alg = run_algorithm1(sc, cfg);
  ASSERT_EQ(eq.clusters.size(), 1u);
  EXPECT_NEAR(eq.sumrate, alg.sumrate, 1e-9 * alg.sumrate);
}

TEST(IciAgnostic, EvaluatedUnderTrueInterference) {
  SimConfig cfg;
  cfg.num_ues = 20;
  cfg.num_sbs = 2;
  cfg.ici_db = 20.0;
  const auto sc = generate_scenario(cfg, 3);
  ASSERT_GT(sc.ici_power_w, 0.0);
  const auto rep = run_ici_agnostic(sc, cfg, Scheme::noma);
  const auto rates = evaluate_allocation(rep.clusters, sc);
  double total = 0.0;
  for (const auto& r : rates) total += r.rate_bps;
  EXPECT_DOUBLE_EQ(rep.sumrate, total);
  EXPECT_EQ(rep.scenario_hash, scenario_hash(sc));
}

TEST(Metrics, SelfNormalizationAndCounts) {
  const auto sc = macro_only({4e-11, 2e-11, 1e-11, 5e-12}, 0.0, 0.0);
  const auto rep = run_algorithm1(sc, small_config(2));
  const auto m = metrics(rep, &rep);
  ASSERT_TRUE(m.normalized.has_value());
  EXPECT_DOUBLE_EQ(*m.normalized, 1.0);
  EXPECT_EQ(m.qos_satisfied, 4);
  EXPECT_EQ(m.num_clusters, 2);
  EXPECT_EQ(m.messages, static_cast<long long>(rep.outer_iterations) * 2);
  EXPECT_EQ(m.rate_quantiles.size(), m.quantile_levels.size());
  for (std::size_t i = 1; i < m.rate_quantiles.size(); ++i) {
    EXPECT_LE(m.rate_quantiles[i - 1], m.rate_quantiles[i]);
  }
}

TEST(Metrics, BaselineFromOtherScenarioRejected) {
  const auto a = run_oma(macro_only({1e-11}, 0.0, 0.0), small_config(1));
  const auto b = run_oma(macro_only({2e-11}, 0.0, 0.0), small_config(1));
  EXPECT_THROW(metrics(a, &b), DomainError);
}

TEST(Metrics, Quantile) {
  EXPECT_DOUBLE_EQ(quantile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({0.0, 10.0}, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(quantile({}, 0.5), 0.0);
}

TEST(Sweep, RowsAreOrderedAndAveraged) {
  SimConfig cfg;
  cfg.num_ues = 12;
  cfg.num_sbs = 1;
  SweepSpec spec;
  spec.axis = SweepAxis::epsilon;
  spec.values = {0.0, 1e-3};
  spec.seeds = 2;
  spec.schemes = {Scheme::equal};
  const auto serial = run_sweep(cfg, spec, 1);
  const auto pooled = run_sweep(cfg, spec, 3);
  ASSERT_EQ(serial.size(), 6u);
  ASSERT_EQ(pooled.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].value, pooled[i].value);
    EXPECT_EQ(serial[i].seed, pooled[i].seed);
    EXPECT_EQ(serial[i].sumrate, pooled[i].sumrate);
  }
  EXPECT_FALSE(serial[2].seed.has_value());
  EXPECT_DOUBLE_EQ(serial[2].sumrate, 0.5 * (serial[0].sumrate + serial[1].sumrate));
}

TEST(Sweep, IciAxisAddsAgnosticVariant) {
  SimConfig cfg;
  cfg.num_ues = 10;
  cfg.num_sbs = 1;
  SweepSpec spec;
  spec.axis = SweepAxis::ici_db;
  spec.values = {20.0};
  spec.seeds = 1;
  spec.schemes = {Scheme::equal};
  const auto rows = run_sweep(cfg, spec);
  bool aware = false, agnostic = false;
  for (const auto& r : rows) {
    aware = aware || r.variant == "aware";
    agnostic = agnostic || r.variant == "agnostic";
  }
  EXPECT_TRUE(aware);
  EXPECT_TRUE(agnostic);
}

TEST(Sweep, AxisParsing) {
  EXPECT_EQ(parse_axis("p_delta"), SweepAxis::p_delta);
  EXPECT_THROW(parse_axis("gamma"), ConfigError);
  EXPECT_THROW(apply_axis(SimConfig{}, SweepAxis::K, 2.5), ConfigError);
  EXPECT_EQ(apply_axis(SimConfig{}, SweepAxis::K, 3.0).cluster_size, 3);
  EXPECT_THROW(parse_scheme("cdma"), ConfigError);
}

}  // namespace
}  // namespace hetnoma
