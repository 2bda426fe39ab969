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

#pragma once

#include <random>

#include "edgegame/model.hpp"
#include "edgegame/stackelberg.hpp"

namespace edgegame::testing {

// Two edge providers, R = [2, 1], p = [0.3, 0.2], R_c = 2, p_c = 0.2, K = 100.
inline SystemConfig scenario_a() {
  SystemConfig cfg;
  cfg.n_users = 100;
  cfg.ecp_power = Vector{{2.0, 1.0}};
  cfg.ecp_access_price = Vector{{0.3, 0.2}};
  cfg.cloud_power = 2.0;
  cfg.cloud_access_price = 0.2;
  cfg.learning_rate = 1.0;
  cfg.mapping_factor = 1.0;
  cfg.discount_rate = 0.1;
  cfg.ecp_weights = {1.0, 1.0, 1.0};
  cfg.ccp_weights = {1.0, 1.0, 1.0};
  cfg.nominal_rate = 0.05;
  cfg.horizon = 50.0;
  return cfg;
}

inline PopulationState scenario_a_x0() { return {Vector{{0.3, 0.3, 0.4}}}; }

// N = 1 with every parameter at one.
inline SystemConfig unit_config() {
  SystemConfig cfg;
  cfg.n_users = 1;
  cfg.ecp_power = Vector{{1.0}};
  cfg.ecp_access_price = Vector{{1.0}};
  cfg.cloud_power = 1.0;
  cfg.cloud_access_price = 1.0;
  cfg.learning_rate = 1.0;
  cfg.mapping_factor = 1.0;
  cfg.discount_rate = 0.1;
  cfg.ecp_weights = {1.0, 1.0, 1.0};
  cfg.ccp_weights = {1.0, 1.0, 1.0};
  cfg.nominal_rate = 1.0;
  cfg.horizon = 1.0;
  return cfg;
}

// Random market with moderate magnitudes and an interior population.
struct RandomMarket {
  SystemConfig cfg;
  PopulationState pop;
  EcpCostate ecp;
  CcpCostate ccp;
};

inline RandomMarket random_market(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  const auto N = static_cast<Eigen::Index>(n);
  RandomMarket m;
  auto& cfg = m.cfg;
  cfg.n_users = 10 + static_cast<std::size_t>(in(0, 90));
  cfg.ecp_power = Vector(N);
  cfg.ecp_access_price = Vector(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    cfg.ecp_power(i) = in(0.5, 3.0);
    cfg.ecp_access_price(i) = in(0.1, 0.5);
  }
  cfg.cloud_power = cfg.ecp_power.maxCoeff() + in(0.5, 5.0);
  cfg.cloud_access_price = in(0.1, 0.5);
  cfg.learning_rate = in(0.5, 2.0);
  cfg.mapping_factor = in(0.5, 2.0);
  cfg.discount_rate = in(0.05, 0.5);
  cfg.ecp_weights = {in(0.5, 2), in(0.5, 2), in(0.5, 2)};
  cfg.ccp_weights = {in(0.5, 2), in(0.5, 2), in(0.5, 2)};
  cfg.nominal_rate = in(0.02, 0.1);
  cfg.horizon = 10.0;
  Vector x(N + 1);
  for (Eigen::Index i = 0; i <= N; ++i) x(i) = in(0.2, 1.0);
  m.pop = {x / x.sum()};
  m.ecp = {Matrix(N, N)};
  m.ccp = {Vector(N), Matrix(N, N)};
  for (Eigen::Index i = 0; i < N; ++i) {
    m.ccp.mu(i) = in(-2, 2);
    for (Eigen::Index j = 0; j < N; ++j) {
      m.ecp.lambda(i, j) = in(-2, 2);
      m.ccp.theta(i, j) = in(-2, 2);
    }
  }
  return m;
}

}  // namespace edgegame::testing
