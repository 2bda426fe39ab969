/*
 Copyright 2026 The edgegame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "edgegame/replicator.hpp"
#include "fixtures.hpp"

namespace edgegame {
namespace {

using testing::scenario_a;
using testing::unit_config;

// Independent reference: classical RK4 on the undelayed field, no simplex
// correction.
PopulationState integrate_reference(const SystemConfig& cfg, PopulationState x,
                                    const AllocationState& alloc, double T, double dt) {
  auto f = [&](const Vector& s) { return replicator_rhs(cfg, {s}, alloc); };
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int k = 0; k < steps; ++k) {
    const Vector k1 = f(x.shares);
    const Vector k2 = f(x.shares + 0.5 * dt * k1);
    const Vector k3 = f(x.shares + 0.5 * dt * k2);
    const Vector k4 = f(x.shares + dt * k3);
    x.shares += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

SystemConfig one_versus_three() {
  auto cfg = unit_config();
  cfg.cloud_power = 3.0;
  return cfg;
}

TEST(ReplicatorRhs, HandEvaluatedTwoStrategies) {
  const Vector xdot = replicator_rhs(one_versus_three(), {Vector{{0.5, 0.5}}}, AllocationState::zero(1));
  EXPECT_NEAR(xdot(0), -1.0, 1e-15);
  EXPECT_NEAR(xdot(1), 1.0, 1e-15);
}

TEST(ReplicatorRhs, SumsToZero) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int i = 0; i < 100; ++i) {
    auto m = testing::random_market(rng, 4);
    const AllocationState alloc{Vector{{u(rng), u(rng), u(rng), u(rng)}}};
    EXPECT_NEAR(replicator_rhs(m.cfg, m.pop, alloc).sum(), 0.0, 1e-12);
  }
}

TEST(ReplicatorRhs, LinearInLearningRate) {
  auto cfg = scenario_a();
  const AllocationState alloc{Vector{{0.1, 0.2}}};
  const Vector base = replicator_rhs(cfg, testing::scenario_a_x0(), alloc);
  cfg.learning_rate = 3.5;
  EXPECT_TRUE(replicator_rhs(cfg, testing::scenario_a_x0(), alloc).isApprox(3.5 * base, 1e-14));
}

TEST(ReplicatorRhs, ZeroAtAnalyticEss) {
  const auto cfg = scenario_a();
  for (const Vector& r : {Vector{{0.0, 0.0}}, Vector{{0.3, 0.1}}, Vector{{0.5, 0.45}}}) {
    const auto ess = analytic_ess(cfg, {r});
    EXPECT_LT(replicator_rhs(cfg, ess.shares, {r}).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ReplicatorRhs, AffineFormMatchesExpandedSystem) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    auto m = testing::random_market(rng, 3);
    const AllocationState alloc{Vector{{0.1, 0.05, 0.2}}};
    const Vector expanded = pi_matrix(m.cfg, alloc) * m.pop.shares + pi_offset(m.cfg, alloc);
    EXPECT_TRUE(replicator_rhs(m.cfg, m.pop, alloc).isApprox(expanded, 1e-12));
  }
}

TEST(DelayedRhs, EqualArgumentsBitMatchUndelayed) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 20; ++i) {
    auto m = testing::random_market(rng, 3);
    const AllocationState alloc{Vector{{0.2, 0.0, 0.1}}};
    const Vector plain = replicator_rhs(m.cfg, m.pop, alloc);
    for (auto mode : {DelayedMean::delayed_shares, DelayedMean::current_shares}) {
      const Vector delayed = delayed_replicator_rhs(m.cfg, m.pop, m.pop, alloc, mode);
      for (Eigen::Index s = 0; s < plain.size(); ++s) EXPECT_EQ(delayed(s), plain(s));
    }
  }
}

TEST(DelayedRhs, ZeroAtEss) {
  const auto cfg = scenario_a();
  const auto alloc = AllocationState::zero(2);
  const auto ess = analytic_ess(cfg, alloc).shares;
  for (auto mode : {DelayedMean::delayed_shares, DelayedMean::current_shares}) {
    EXPECT_LT(delayed_replicator_rhs(cfg, ess, ess, alloc, mode).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DelayedRhs, DelayedSharesMeanSumsToZero) {
  const auto cfg = scenario_a();
  const PopulationState now{Vector{{0.2, 0.5, 0.3}}};
  const Vector xdot =
      delayed_replicator_rhs(cfg, now, testing::scenario_a_x0(), AllocationState::zero(2));
  EXPECT_NEAR(xdot.sum(), 0.0, 1e-15);
  // Affine in the delayed state: c - Theta x(t - tau).
  const Vector expected = pi_offset(cfg, AllocationState::zero(2)) -
                          theta(cfg, AllocationState::zero(2)) * testing::scenario_a_x0().shares;
  EXPECT_TRUE(xdot.isApprox(expected, 1e-14));
}

TEST(AnalyticEss, ScenarioA) {
  const auto ess = analytic_ess(scenario_a(), AllocationState::zero(2));
  EXPECT_NEAR(ess.shares.shares(0), 4.0 / 13.0, 1e-15);
  EXPECT_NEAR(ess.shares.shares(1), 3.0 / 13.0, 1e-15);
  EXPECT_NEAR(ess.shares.shares(2), 6.0 / 13.0, 1e-15);
  const auto reached = integrate_reference(scenario_a(), testing::scenario_a_x0(),
                                           AllocationState::zero(2), 200.0, 0.01);
  EXPECT_LT((reached.shares - ess.shares.shares).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AnalyticEss, OneVersusThree) {
  const auto cfg = one_versus_three();
  const auto ess = analytic_ess(cfg, AllocationState::zero(1));
  EXPECT_NEAR(ess.shares.shares(0), 0.25, 1e-15);
  EXPECT_NEAR(ess.shares.shares(1), 0.75, 1e-15);
  const auto reached = integrate_reference(cfg, {Vector{{0.9, 0.1}}}, AllocationState::zero(1), 40.0, 0.01);
  EXPECT_LT((reached.shares - ess.shares.shares).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AnalyticEss, SymmetricProvidersGiveUniformShares) {
  auto cfg = scenario_a();
  cfg.ecp_power = Vector{{2.0, 2.0}};
  cfg.ecp_access_price = Vector{{0.2, 0.2}};
  const auto ess = analytic_ess(cfg, AllocationState::zero(2));
  for (Eigen::Index s = 0; s < 3; ++s) EXPECT_NEAR(ess.shares.shares(s), 1.0 / 3.0, 1e-15);
}

TEST(AnalyticEss, CommonUtilityEqualisesEveryProvider) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    auto m = testing::random_market(rng, 4);
    const AllocationState alloc{Vector{{0.1, 0.2, 0.0, 0.3}}};
    const auto ess = analytic_ess(m.cfg, alloc);
    const Vector pi = user_utility(m.cfg, {ess.shares, alloc, 0.0, 0.0});
    EXPECT_LT((pi.array() - ess.common_utility).abs().maxCoeff(), 1e-12 * ess.common_utility);
    EXPECT_NEAR(ess.shares.shares.sum(), 1.0, 1e-15);
  }
}

TEST(AnalyticEss, GlobalConvergenceFromRandomInteriorStarts) {
  const auto cfg = scenario_a();
  const AllocationState alloc{Vector{{0.2, 0.1}}};
  const auto ess = analytic_ess(cfg, alloc);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 10; ++i) {
    Vector x{{u(rng), u(rng), u(rng)}};
    const auto reached = integrate_reference(cfg, {x / x.sum()}, alloc, 100.0, 0.02);
    EXPECT_LT((reached.shares - ess.shares.shares).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Spectrum, ScenarioAAllEqualMinusTheta) {
  const auto cfg = scenario_a();
  const double Theta = theta(cfg, AllocationState::zero(2));
  const auto ev = ess_jacobian_eigen(cfg, AllocationState::zero(2));
  ASSERT_EQ(ev.size(), 3u);
  for (const auto& z : ev) {
    EXPECT_NEAR(z.real(), -Theta, 1e-8);
    EXPECT_NEAR(z.imag(), 0.0, 1e-8);
  }
  EXPECT_NEAR(Theta, 0.21667, 1e-5);
}

TEST(Spectrum, UnitParameters) {
  const auto ev = ess_jacobian_eigen(unit_config(), AllocationState::zero(1));
  ASSERT_EQ(ev.size(), 2u);
  for (const auto& z : ev) EXPECT_NEAR(z.real(), -2.0, 1e-12);
}

TEST(Spectrum, NumericalJacobianIndependentOfState) {
  const auto cfg = scenario_a();
  const AllocationState alloc{Vector{{0.1, 0.3}}};
  const double Theta = theta(cfg, alloc);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 10; ++i) {
    Vector x{{u(rng), u(rng), u(rng)}};
    const Matrix jac = numerical_jacobian(cfg, {x / x.sum()}, alloc);
    EXPECT_LT((jac + Theta * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-7);
    for (const auto& z : eigenvalues(jac)) EXPECT_LT(z.real(), 0.0);
  }
}

TEST(DelayBound, Values) {
  EXPECT_NEAR(delay_stability_bound(unit_config(), AllocationState::zero(1)), std::numbers::pi / 4, 1e-15);
  auto cfg = scenario_a();
  const double tau = delay_stability_bound(cfg, AllocationState::zero(2));
  EXPECT_NEAR(tau, 7.249, 1e-3);
  cfg.learning_rate *= 2.0;
  EXPECT_NEAR(delay_stability_bound(cfg, AllocationState::zero(2)), tau / 2.0, 1e-14);
}

TEST(ReplicatorFieldTest, UsesControlSource) {
  const auto cfg = scenario_a();
  const AllocationState alloc{Vector{{0.2, 0.1}}};
  const ReplicatorField field(cfg, [&](double) { return Controls{alloc, 0.5}; });
  const auto x = testing::scenario_a_x0();
  EXPECT_TRUE(field(1.0, x.shares).isApprox(replicator_rhs(cfg, x, alloc)));
  EXPECT_DOUBLE_EQ(field.controls(2.0).price, 0.5);
}

}  // namespace
}  // namespace edgegame
