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

#include "edgegame/integrate.hpp"
#include "edgegame/replicator.hpp"
#include "fixtures.hpp"

namespace edgegame {
namespace {

const auto decay = [](double, const Vector& x) -> Vector { return -x; };

double decay_error(double dt) {
  const auto path = integrate_ode(decay, Vector::Ones(1), 0.0, 1.0, dt);
  return std::abs(path.states.back()(0) - std::exp(-1.0));
}

TEST(IntegrateOde, ExponentialDecay) {
  const auto path = integrate_ode(decay, Vector::Ones(1), 0.0, 1.0, 1e-3);
  ASSERT_EQ(path.times.size(), 1001u);
  EXPECT_NEAR(path.states.back()(0), 0.3678794, 1e-7);
  EXPECT_NEAR(path.states.back()(0), std::exp(-1.0), 1e-9);
  EXPECT_DOUBLE_EQ(path.times.back(), 1.0);
}

TEST(IntegrateOde, FourthOrderErrorDecay) {
  for (double dt : {0.1, 0.05, 0.025}) {
    const double ratio = decay_error(dt) / decay_error(dt / 2);
    EXPECT_NEAR(std::log2(ratio), 4.0, 0.1) << "dt " << dt;
  }
}

TEST(IntegrateOde, BackwardInTime) {
  const auto path = integrate_ode(decay, Vector::Ones(1), 1.0, 0.0, -1e-3);
  EXPECT_NEAR(path.states.back()(0), std::exp(1.0), 1e-9);
  EXPECT_DOUBLE_EQ(path.times.back(), 0.0);
}

TEST(IntegrateOde, RejectsRaggedSpan) {
  EXPECT_THROW(integrate_ode(decay, Vector::Ones(1), 0.0, 1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(integrate_ode(decay, Vector::Ones(1), 0.0, 1.0, -0.1), std::invalid_argument);
}

TEST(IntegrateOde, BlowUp) {
  const auto grow = [](double, const Vector& x) -> Vector { return 10.0 * x; };
  EXPECT_THROW(integrate_ode(grow, Vector::Ones(1), 0.0, 5.0, 0.01), BlowUp);
}

TEST(EnforceSimplex, FloorsAndRenormalises) {
  Vector x{{0.5, -1e-5, 0.6}};
  enforce_simplex(x);
  EXPECT_GT(x.minCoeff(), 0.0);
  EXPECT_NEAR(x.sum(), 1.0, 1e-15);
  Vector y{{0.25, 0.75}};
  enforce_simplex(y);
  EXPECT_EQ(y(0), 0.25);
}

TEST(IntegrateOde, ReplicatorReachesEss) {
  const auto cfg = testing::scenario_a();
  const auto alloc = AllocationState::zero(2);
  const auto f = [&](double, const Vector& x) { return replicator_rhs(cfg, {x}, alloc); };
  const auto path = integrate_ode(f, testing::scenario_a_x0().shares, 0.0, 50.0, 0.01, {.simplex = true});
  const Vector ess = analytic_ess(cfg, alloc).shares.shares;
  EXPECT_LT((path.states.back() - ess).cwiseAbs().maxCoeff(), 1e-4);
  double drift = 0.0;
  for (const auto& x : path.states) drift = std::max(drift, std::abs(x.sum() - 1.0));
  EXPECT_LT(drift, 1e-9);
}

TEST(IntegrateDde, ZeroDelayBitMatchesOde) {
  const auto cfg = testing::scenario_a();
  const AllocationState alloc{Vector{{0.2, 0.1}}};
  const auto f = [&](double, const Vector& x, const Vector& y) {
    return delayed_replicator_rhs(cfg, {x}, {y}, alloc);
  };
  const auto g = [&](double, const Vector& x) { return replicator_rhs(cfg, {x}, alloc); };
  const auto a = integrate_dde(f, testing::scenario_a_x0().shares, 0.0, 0.0, 5.0, 0.01, {.simplex = true});
  const auto b = integrate_ode(g, testing::scenario_a_x0().shares, 0.0, 5.0, 0.01, {.simplex = true});
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    ASSERT_EQ(a.states[k], b.states[k]) << "node " << k;
  }
}

// x' = -x(t - 1), x = 1 on [-1, 0]: x = 1 - t on [0, 1] and
// 1 - t + (t - 1)^2 / 2 on [1, 2].
TEST(IntegrateDde, MethodOfStepsSolution) {
  const auto f = [](double, const Vector&, const Vector& y) -> Vector { return -y; };
  const auto path = integrate_dde(f, Vector::Ones(1), 1.0, 0.0, 2.0, 0.01);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double t = path.times[k];
    const double exact = t <= 1.0 ? 1.0 - t : 1.0 - t + 0.5 * (t - 1) * (t - 1);
    EXPECT_NEAR(path.states[k](0), exact, 1e-12) << "t " << t;
  }
}

TEST(IntegrateDde, OffGridDelayUsesInterpolatedHistory) {
  // Delay 0.735 is not a multiple of the step; third segment is cubic.
  const double tau = 0.735;
  const auto f = [](double, const Vector&, const Vector& y) -> Vector { return -y; };
  const auto exact = [tau](double t) {
    if (t <= tau) return 1.0 - t;
    if (t <= 2 * tau) return 1.0 - t + 0.5 * (t - tau) * (t - tau);
    return 1.0 - t + 0.5 * (t - tau) * (t - tau) - std::pow(t - 2 * tau, 3) / 6.0;
  };
  const auto path = integrate_dde(f, Vector::Ones(1), tau, 0.0, 2.0, 0.01);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    EXPECT_NEAR(path.states[k](0), exact(path.times[k]), 1e-5) << "t " << path.times[k];
  }
}

TEST(IntegrateDde, DelayShorterThanStep) {
  const auto f = [](double, const Vector&, const Vector& y) -> Vector { return -y; };
  const auto path = integrate_dde(f, Vector::Ones(1), 0.004, 0.0, 1.0, 0.01);
  // Small delay perturbs exp(-t) by O(tau).
  EXPECT_NEAR(path.states.back()(0), std::exp(-1.0), 5e-3);
}

TEST(HistoryRingTest, NodesExactAndCubicsReproduced) {
  HistoryRing ring(Vector::Constant(1, 7.0), 0.0, 0.5, 2.0);
  const auto cubic = [](double t) { return t * t * t - t; };
  const auto slope = [](double t) { return 3 * t * t - 1; };
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.5 * k;
    ring.push(Vector::Constant(1, cubic(t)), Vector::Constant(1, slope(t)));
  }
  EXPECT_EQ(ring.at(-0.3)(0), 7.0);
  EXPECT_EQ(ring.at(4.5)(0), cubic(4.5));
  EXPECT_NEAR(ring.at(4.2)(0), cubic(4.2), 1e-12);
  EXPECT_NEAR(ring.at(5.1)(0), cubic(5.0) + 0.1 * slope(5.0), 1e-12);
  EXPECT_THROW(ring.at(0.7), std::logic_error);
}

}  // namespace
}  // namespace edgegame
