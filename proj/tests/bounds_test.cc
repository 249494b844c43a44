// Copyright 2026 The rwrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rwrs/bounds.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rwrs/estimators.h"
#include "rwrs/regeneration.h"

namespace rwrs {
namespace {

// Reference values below were computed with 30-digit arithmetic.

TEST(RhsTest, LevelSet) {
  EXPECT_NEAR(levelset_rhs(1000, 0.25, 40, 10), 3.13909898672871734e-41, 1e-54);
  EXPECT_DOUBLE_EQ(levelset_rhs(1000, 0.25, 40, 0, 0.0), 1.0);
  // Large n and small t make the bound exceed one.
  EXPECT_GT(levelset_rhs(1e4, 0.1, 1, 1), 1.0);
}

TEST(RhsTest, HeavyMassAndMax) {
  EXPECT_NEAR(heavy_mass_rhs(2.0, 0.3, 10.0), 0.446260320296859683, 1e-15);
  EXPECT_NEAR(max_rhs(1000, std::log(1.5), 7), 87.7914951989026063, 1e-11);
  EXPECT_DOUBLE_EQ(max_rhs(50, 0.7, 1), 50.0);
}

TEST(RhsTest, MaxConstants) {
  for (int d = 2; d <= 6; ++d) {
    const double p_o = (d - 1.0) / d;
    EXPECT_NEAR(tree_max_constant(d), -std::log(1 - d / (d + 1.0) * p_o), 1e-15);
    EXPECT_NEAR(tree_max_constant(d), std::log((d + 1.0) / 2.0), 1e-15);
  }
  EXPECT_NEAR(lattice_max_constant(3), 1.07723052782751872, 1e-12);
  EXPECT_EQ(max_constant(Graph::tree(4)), tree_max_constant(4));
  EXPECT_EQ(max_constant(Graph::lattice(3)), lattice_max_constant(3));
}

TEST(RhsTest, SiltAndLattice) {
  EXPECT_NEAR(silt_rhs(0.5, 1000, 1.0 / 3.0), 0.00673794699908546710, 1e-16);
  EXPECT_NEAR(lattice_t_star(3, 1e4, 3), 9.12562066059755864, 1e-13);
  EXPECT_NEAR(lattice_speed(3, 1e4, 3), 9.08355348427968611, 1e-13);
  EXPECT_NEAR(lattice_heavy_mass_rhs(0.2, 3, 1e4, 3), 0.162559580227719579, 1e-15);
}

TEST(RhsTest, SceneryCount) {
  EXPECT_NEAR(scenery_count_rhs(3, 1e4, 3, 4, 5) / 1.49858353585609340e29, 1.0, 1e-12);
  // m = 2 removes the polynomial decay in n.
  const double l = std::log(1e6);
  EXPECT_NEAR(scenery_count_rhs(1, 1e6, 1, 2, 1), std::numbers::e * l * l * l * l, 1e-9);
}

TEST(LevelSetCheckTest, CertainEventsAndMonotonicity) {
  const std::vector<LevelSetPoint> points = {{1, 1}, {2, 5}, {2, 20}, {4, 20}};
  const auto checks = check_levelset(3, 400, lambda_d(3) / 2, points, 500, 3, 1);
  ASSERT_EQ(checks.size(), 4u);
  EXPECT_EQ(checks[0].hits, 500);
  EXPECT_GE(checks[1].hits, checks[2].hits);
  EXPECT_GE(checks[2].hits, checks[3].hits);
  for (const auto& c : checks) {
    EXPECT_EQ(c.lemma, "levelset");
    EXPECT_EQ(c.holds, c.rhs >= c.ci_low);
  }
  EXPECT_THROW(check_levelset(3, 400, lambda_d(3), points, 10, 3), std::invalid_argument);
  EXPECT_THROW(check_levelset(2, 400, 0.01, points, 10, 3), std::invalid_argument);
}

TEST(HeavyMassCheckTest, CalibrationReproducesUpperLimit) {
  const std::vector<double> us = {0.0, 10.0, 1e6};
  const auto checks = check_heavy_mass(3, 500, us, 400, 5, 1);
  ASSERT_EQ(checks.size(), 3u);
  EXPECT_TRUE(checks[0].calibration);
  EXPECT_FALSE(checks[1].calibration);
  // u = 0 is certain, so M = 1 and the first point sits exactly at its upper limit.
  EXPECT_EQ(checks[0].hits, 400);
  EXPECT_DOUBLE_EQ(checks[0].rhs, checks[0].ci_high);
  EXPECT_EQ(checks[2].hits, 0);
  EXPECT_TRUE(checks[2].holds);
}

TEST(MaxCheckTest, CertainAtOneAndWorkerIndependent) {
  const std::vector<double> xs = {1, 3, 6, 10};
  for (const Graph& g : {Graph::tree(2), Graph::lattice(3)}) {
    const auto a = check_max(g, 1000, xs, 600, 11, 1);
    const auto b = check_max(g, 1000, xs, 600, 11, 3);
    EXPECT_EQ(a[0].hits, 600);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_EQ(a[i].hits, b[i].hits);
      if (i > 0) EXPECT_LE(a[i].hits, a[i - 1].hits);
    }
  }
}

TEST(MaxCheckTest, GeometricTailOfReturns) {
  // On T_2 the number of visits to the root is geometric with return
  // probability 1/2, so P(l(root) >= x) = 2^{1-x} bounds the maximum from below.
  const std::vector<double> xs = {4};
  const auto c = check_max(Graph::tree(2), 2000, xs, 4000, 13, 1);
  EXPECT_GE(c[0].ci_high, 0.125);
}

TEST(SiltCheckTest, CertainAtMassOne) {
  // sum l^2 >= sum l = n + 1, so B = 1 always hits and c calibrates to 0.
  const std::vector<std::int64_t> ns = {200, 400};
  const auto checks = check_silt(Graph::tree(3), ns, 2, 1.0, 300, 2, 1);
  ASSERT_EQ(checks.size(), 2u);
  for (const auto& c : checks) {
    EXPECT_EQ(c.hits, 300);
    EXPECT_DOUBLE_EQ(c.rhs, 1.0);
    EXPECT_TRUE(c.holds);
  }
  EXPECT_THROW(check_silt(Graph::lattice(3), ns, 3, 1.0, 10, 2), std::invalid_argument);
  EXPECT_THROW(check_silt(Graph::tree(3), ns, 4, 1.0, 10, 2), std::invalid_argument);
}

TEST(SiltCheckTest, ExponentFollowsGraph) {
  const std::vector<std::int64_t> ns = {100};
  EXPECT_DOUBLE_EQ(check_silt(Graph::tree(3), ns, 3, 2.0, 50, 2)[0].params["exponent"].get<double>(),
                   1.0 / 3.0);
  EXPECT_DOUBLE_EQ(check_silt(Graph::tree(3), ns, 2, 2.0, 50, 2)[0].params["exponent"].get<double>(),
                   0.5);
  EXPECT_DOUBLE_EQ(check_silt(Graph::lattice(3), ns, 2, 2.0, 50, 2)[0].params["exponent"].get<double>(),
                   1.0 / 3.0);
}

TEST(LatticeHeavyMassCheckTest, ShellDiagnostics) {
  const std::vector<double> ys = {2.0, 4.0, 8.0};
  const auto checks = check_lattice_heavy_mass(3, 2000, ys, 200, 7, 1);
  ASSERT_EQ(checks.size(), 3u);
  EXPECT_TRUE(checks[0].calibration);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double t_star = lattice_t_star(ys[i], 2000, 3);
    EXPECT_DOUBLE_EQ(checks[i].params["t_star"].get<double>(), t_star);
    const int K = checks[i].diagnostics["K"].get<int>();
    EXPECT_EQ(checks[i].diagnostics["mean_shell_sizes"].size(), static_cast<std::size_t>(K + 1));
    if (i > 0) EXPECT_LE(checks[i].hits, checks[i - 1].hits);
  }
}

TEST(SceneryCountCheckTest, BoundedSupportBelowCut) {
  // |xi| <= 1 while the cut sqrt(n) / (y log^2 n) exceeds 1, so no site counts.
  const std::vector<double> xs = {1, 2};
  const auto checks = check_scenery_count(Graph::tree(3), SceneryDistribution::uniform_centered(1),
                                          10000, 0.1, 4, xs, 100, 1, 1);
  for (const auto& c : checks) EXPECT_EQ(c.hits, 0);
  EXPECT_GT(checks[0].diagnostics["scenery_threshold"].get<double>(), 1.0);
}

TEST(SceneryCountCheckTest, RademacherAboveCutCountsEverySite) {
  // With a cut below 1 every visited site counts; the range is at least 2.
  const std::vector<double> xs = {2};
  const auto checks = check_scenery_count(Graph::lattice(3), SceneryDistribution::rademacher(),
                                          100, 10, 4, xs, 100, 1, 1);
  EXPECT_LT(checks[0].diagnostics["scenery_threshold"].get<double>(), 1.0);
  EXPECT_EQ(checks[0].hits, 100);
  EXPECT_THROW(check_scenery_count(Graph::tree(3), SceneryDistribution::symmetric_pareto(2), 100,
                                   1, 4, xs, 10, 1),
               MomentError);
}

}  // namespace
}  // namespace rwrs
