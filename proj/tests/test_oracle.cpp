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

#include <algorithm>
#include <random>
#include <vector>

#include "hetnoma/oracle.hpp"
#include "hetnoma/verify.hpp"

namespace hetnoma {
namespace {

SlaveInput two_member(double varpi, double q2, double delta2) {
  SlaveInput in;
  in.varpi = varpi;
  in.theta = 1.0;
  in.bandwidth_hz = 1.0;
  in.rho = {0.05, 0.1};
  in.q = {1.0, q2};
  in.delta = {0.0, delta2};
  in.eps = {0.0, 0.0};
  return in;
}

TEST(GridSlave, TwoMemberExampleWithinOnePercent) {
  const auto in = two_member(1.0, 2.0, 0.01);
  const auto sol = solve(in);
  const auto grid = oracle::grid_slave(in, 1e-3);
  ASSERT_TRUE(sol.feasible);
  ASSERT_FALSE(grid.empty);
  EXPECT_NEAR(grid.sumrate, sol.sumrate, 0.01 * sol.sumrate);
}

TEST(GridSlave, EmptyBelowMinimumBudget) {
  auto in = two_member(1.0, 3.0, 0.01);
  in.rho = {0.05, 0.4};
  double varpi = 1.0;
  while (!oracle::grid_slave(in, 1e-3, 0.0).empty && varpi > 1e-6) {
    varpi *= 0.5;
    in.varpi = varpi;
  }
  EXPECT_TRUE(oracle::grid_slave(in, 1e-3, 0.0).empty);
  EXPECT_FALSE(solve(in).feasible);
}

TEST(GridSlave, SingleMemberIsOnePoint) {
  SlaveInput in;
  in.varpi = 0.4;
  in.rho = {0.1};
  in.q = {1.5};
  in.delta = {0.0};
  in.eps = {0.0};
  const auto grid = oracle::grid_slave(in, 1e-3);
  ASSERT_FALSE(grid.empty);
  EXPECT_EQ(grid.omega, (std::vector<double>{0.4}));
}

TEST(GridSlave, PointsRespectConstraintsWithoutTolerance) {
  const SimConfig cfg;
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const auto in = oracle::random_feasible_slave_input(rng, 3, 1e-3, cfg);
    if (!in) continue;
    const auto grid = oracle::grid_slave(*in, 5e-3, 0.0);
    if (grid.empty) continue;
    const auto s = constraint_slacks(*in, grid.omega);
    EXPECT_NEAR(s.budget, 0.0, 1e-12);
    for (double v : s.qos) EXPECT_GE(v, -1e-12);
    for (std::size_t i = 1; i < s.pdsc.size(); ++i) EXPECT_GE(s.pdsc[i], -1e-12);
  }
}

TEST(LinearSystemOmega, ReproducesTwoMemberExamples) {
  const auto q = oracle::linear_system_omega(two_member(1.0, 2.0, 0.01), ActiveSet{{Tight::qos}});
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR((*q)[0], 0.45, 1e-14);
  EXPECT_NEAR((*q)[1], 0.55, 1e-14);
  const auto p = oracle::linear_system_omega(two_member(1.0, 1.2, 0.2), ActiveSet{{Tight::pdsc}});
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR((*p)[0], 0.4, 1e-14);
  EXPECT_NEAR((*p)[1], 0.6, 1e-14);
}

TEST(LinearSystemOmega, ThreeMembersWithoutSicErrorMatchTable) {
  const SimConfig cfg;
  std::mt19937_64 rng(22);
  for (int t = 0; t < 50; ++t) {
    const auto in = oracle::random_slave_input(rng, 3, 0.0, cfg);
    for (const auto& as : enumerate_active_sets(3)) {
      const auto lin = oracle::linear_system_omega(in, as);
      ASSERT_TRUE(lin.has_value());
      const auto tab = table_omega(in, as);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR((*lin)[i], tab[i], 1e-12);
    }
  }
}

TEST(BruteForceAssignment, SmallCases) {
  const WeightMatrix w{{1, 5}, {3, 2}, {4, 0.5}};
  EXPECT_DOUBLE_EQ(oracle::brute_force_assignment(w, Sense::maximize), 9.0);
  EXPECT_DOUBLE_EQ(oracle::brute_force_assignment(w, Sense::minimize), 1.5);
}

std::vector<RankedUe> ues(std::initializer_list<double> gains) {
  std::vector<RankedUe> out;
  int id = 0;
  for (double g : gains) out.push_back({id++, g});
  return out;
}

TEST(ExhaustiveCf, CountsPairings) {
  const auto u = ues({4, 3, 2, 1});
  const auto r = oracle::exhaustive_cf(u, 2, [](std::span<const Cluster>) { return 0.0; });
  EXPECT_EQ(r.enumerated, 3u);
}

TEST(ExhaustiveCf, CountsMatchSetPartitions) {
  // Partitions of 6 items into exactly 2 blocks of size <= 3: 10 (3+3).
  const auto u = ues({6, 5, 4, 3, 2, 1});
  const auto r = oracle::exhaustive_cf(u, 3, [](std::span<const Cluster>) { return 0.0; });
  EXPECT_EQ(r.enumerated, 10u);
  // Into 3 blocks of size <= 2: 15 perfect matchings.
  EXPECT_EQ(oracle::exhaustive_cf(u, 2, [](std::span<const Cluster>) { return 0.0; }).enumerated,
            15u);
}

TEST(ExhaustiveCf, RefusesLargeSets) {
  const std::vector<RankedUe> ten(10, RankedUe{0, 1.0});
  EXPECT_THROW(oracle::exhaustive_cf(ten, 3, [](std::span<const Cluster>) { return 0.0; }),
               DomainError);
}

TEST(ExhaustiveCf, SingleClusterRatioIsOne) {
  const SimConfig cfg;
  std::mt19937_64 rng(30);
  for (int t = 0; t < 10; ++t) {
    const auto c = oracle::compare_clustering(rng, 3, 3, cfg);
    EXPECT_DOUBLE_EQ(c.wmm_score, c.exhaustive_score);
  }
}

TEST(ExhaustiveCf, MatchingClusteringCloseToOptimum) {
  // Six UEs in two full triples. Single instances can dip just below 0.9;
  // the average stays close to one.
  const SimConfig cfg;
  std::mt19937_64 rng(31);
  double sum = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto c = oracle::compare_clustering(rng, 6, 3, cfg);
    EXPECT_LE(c.wmm_score, c.exhaustive_score + 1e-9);
    EXPECT_GT(c.wmm_score / c.exhaustive_score, 0.8) << "instance " << t;
    sum += c.wmm_score / c.exhaustive_score;
  }
  EXPECT_GE(sum / 50.0, 0.95);
}

TEST(Certify, FlagsEachViolation) {
  const auto in = two_member(1.0, 2.0, 0.01);
  auto sol = solve(in);
  ASSERT_TRUE(sol.feasible);
  EXPECT_TRUE(oracle::certify(in, sol).ok);
  auto bad = sol;
  bad.omega[0] += 1e-6;
  EXPECT_EQ(oracle::certify(in, bad).reason, "budget residual");
  bad = sol;
  bad.lambda = -1.0;
  EXPECT_EQ(oracle::certify(in, bad).reason, "negative multiplier");
  bad = sol;
  bad.feasible = false;
  EXPECT_FALSE(oracle::certify(in, bad).ok);
}

TEST(RunVerification, SmallBatchPasses) {
  oracle::VerifyOptions opt;
  opt.instances = 6;
  opt.eps_max = 0.0;
  const auto lines = oracle::run_verification(SimConfig{}, opt);
  ASSERT_FALSE(lines.empty());
  for (const auto& l : lines) {
    if (l.check == "index_vs_wmm") continue;  // short last levels differ
    EXPECT_TRUE(l.pass) << l.check << " #" << l.instance << " " << l.detail;
  }
}

TEST(RunVerification, PsiFlipIsCaught) {
  oracle::VerifyOptions opt;
  opt.instances = 6;
  opt.psi_sign = -1.0;
  const auto lines = oracle::run_verification(SimConfig{}, opt);
  bool caught = false;
  for (const auto& l : lines) caught = caught || (l.check == "closed_form_vs_linear" && !l.pass);
  EXPECT_TRUE(caught);
}

}  // namespace
}  // namespace hetnoma
