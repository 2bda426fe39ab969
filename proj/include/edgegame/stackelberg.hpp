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

// Provider layer: Hamiltonians of the edge followers and the cloud leader,
// their costate fields, and the closed-form open-loop controls.

#pragma once

#include <algorithm>

#include "edgegame/model.hpp"
#include "edgegame/replicator.hpp"

namespace edgegame {

/// Costates of all edge providers. Row n holds lambda_{n,m}, the costate of
/// provider n with respect to edge share x_m. The cloud column is eliminated
/// through the simplex constraint.
struct EcpCostate {
  Matrix lambda;

  static EcpCostate zero(std::size_t n) {
    const auto i = static_cast<Eigen::Index>(n);
    return {Matrix::Zero(i, i)};
  }
};

/// Costates of the cloud provider: mu_n pairs with x_n, theta_{n,m} pairs
/// with the follower costate lambda_{n,m}.
struct CcpCostate {
  Vector mu;
  Matrix theta;

  static CcpCostate zero(std::size_t n) {
    const auto i = static_cast<Eigen::Index>(n);
    return {Vector::Zero(i), Matrix::Zero(i, i)};
  }
};

/// Requests are kept in [0, 1 - kRequestMargin] and their sum likewise.
inline constexpr double kRequestMargin = 1e-6;

/// Linear follower response r_n = intercept - slope * p.
struct RequestResponse {
  double intercept = 0.0;  // A_n
  double slope = 0.0;      // B
};

/// Sensitivity of the edge-share dynamics to r_n, divided by R_c delta beta / K:
/// q_n = e_n / p_n - (1/p_n - 1/p_c) [x_1..x_N].
inline Vector q_vector(const SystemConfig& cfg, const PopulationState& pop, std::size_t n) {
  const auto i = static_cast<Eigen::Index>(n);
  const double inv_pn = 1.0 / cfg.ecp_access_price(i);
  Vector q = -(inv_pn - 1.0 / cfg.cloud_access_price) * pop.ecp_shares();
  q(i) += inv_pn;
  return q;
}

inline RequestResponse decompose_request(const SystemConfig& cfg, const PopulationState& pop,
                                         const EcpCostate& costate, std::size_t n) {
  const auto i = static_cast<Eigen::Index>(n);
  const auto& w = cfg.ecp_weights;
  const double Rc = cfg.cloud_power;
  const double demand_gap = cfg.users() * cfg.nominal_rate * pop.ecp(n) - cfg.ecp_power(i);
  const double adjoint = costate.lambda.row(i).dot(q_vector(cfg, pop, n));
  return {demand_gap / Rc + cfg.rate_scale() * adjoint / (2.0 * w.mismatch * Rc),
          w.trade / (2.0 * w.mismatch * Rc)};
}

/// Stationary point of H_n in r_n, before any feasibility projection.
inline double optimal_request(const SystemConfig& cfg, const PopulationState& pop, double price,
                              const EcpCostate& costate, std::size_t n) {
  const auto [intercept, slope] = decompose_request(cfg, pop, costate, n);
  return intercept - slope * price;
}

/// H_n = u_n + Lambda_n . xdot over the edge share components.
inline double ecp_hamiltonian(const SystemConfig& cfg, const MarketSnapshot& snap,
                              const EcpCostate& costate, std::size_t n) {
  const Vector xdot = replicator_rhs(cfg, snap.population, snap.allocation);
  const auto N = static_cast<Eigen::Index>(cfg.n_ecps());
  return ecp_instant_utility(cfg, snap, n) +
         costate.lambda.row(static_cast<Eigen::Index>(n)).dot(xdot.head(N));
}

/// Time derivative of row n of the follower costates.
inline Vector ecp_costate_rhs(const SystemConfig& cfg, const MarketSnapshot& snap,
                              const EcpCostate& costate, std::size_t n) {
  const auto i = static_cast<Eigen::Index>(n);
  const double growth = cfg.discount_rate + theta(cfg, snap.allocation);
  Vector rate = growth * costate.lambda.row(i).transpose();
  rate(i) -= cfg.ecp_weights.revenue * cfg.ecp_access_price(i) * cfg.users();
  return rate;
}

/// All follower costate derivatives, row n from ecp_costate_rhs(.., n).
inline Matrix ecp_costate_rhs(const SystemConfig& cfg, const MarketSnapshot& snap,
                              const EcpCostate& costate) {
  const double growth = cfg.discount_rate + theta(cfg, snap.allocation);
  Matrix rate = growth * costate.lambda;
  rate.diagonal() -= cfg.ecp_weights.revenue * cfg.users() * cfg.ecp_access_price;
  return rate;
}

/// H_c = u_c + sum_n mu_n xdot_n + sum_{n,m} theta_{n,m} lambdadot_{n,m}.
inline double ccp_hamiltonian(const SystemConfig& cfg, const MarketSnapshot& snap,
                              const EcpCostate& ecp, const CcpCostate& ccp) {
  const auto N = static_cast<Eigen::Index>(cfg.n_ecps());
  const Vector xdot = replicator_rhs(cfg, snap.population, snap.allocation);
  const Matrix lambda_dot = ecp_costate_rhs(cfg, snap, ecp);
  return ccp_instant_utility(cfg, snap) + ccp.mu.dot(xdot.head(N)) +
         ccp.theta.cwiseProduct(lambda_dot).sum();
}

struct CcpCostateRate {
  Vector mu;
  Matrix theta;
};

inline CcpCostateRate ccp_costate_rhs(const SystemConfig& cfg, const MarketSnapshot& snap,
                                      const CcpCostate& ccp) {
  const double Theta = theta(cfg, snap.allocation);
  const double source = cfg.ccp_weights.revenue * cfg.cloud_access_price * cfg.users();
  return {((cfg.discount_rate + Theta) * ccp.mu).array() - source, Theta * ccp.theta};
}

/// Followers' allocation for a given price, without projection.
inline AllocationState follower_response(const SystemConfig& cfg, const PopulationState& pop,
                                         double price, const EcpCostate& ecp) {
  AllocationState alloc = AllocationState::zero(cfg.n_ecps());
  for (std::size_t n = 0; n < cfg.n_ecps(); ++n) {
    alloc.requests(static_cast<Eigen::Index>(n)) = optimal_request(cfg, pop, price, ecp, n);
  }
  return alloc;
}

/// Leader Hamiltonian after substituting the followers' linear response.
inline double leader_hamiltonian(const SystemConfig& cfg, const PopulationState& pop,
                                 const EcpCostate& ecp, const CcpCostate& ccp, double price) {
  return ccp_hamiltonian(cfg, {pop, follower_response(cfg, pop, price, ecp), price, 0.0}, ecp,
                         ccp);
}

namespace detail {

// Pieces of dH_c/dp shared by the closed-form price and its derivative.
struct PriceTerms {
  double sum_intercepts = 0.0;
  double slope = 0.0;
  double costate_drive = 0.0;  // mu and theta*lambda terms, divided by R_c
};

inline PriceTerms price_terms(const SystemConfig& cfg, const PopulationState& pop,
                              const EcpCostate& ecp, const CcpCostate& ccp) {
  const std::size_t N = cfg.n_ecps();
  PriceTerms t;
  for (std::size_t n = 0; n < N; ++n) {
    const auto r = decompose_request(cfg, pop, ecp, n);
    t.sum_intercepts += r.intercept;
    t.slope = r.slope;
  }
  // d Theta / d p = (delta beta / K) R_c B g with g below.
  const double g = -cfg.ecp_access_price.cwiseInverse().sum() +
                   static_cast<double>(N) / cfg.cloud_access_price;
  const Vector share_drive =
      -cfg.ecp_access_price.cwiseInverse() - g * Vector(pop.ecp_shares());
  t.costate_drive = cfg.rate_scale() * t.slope *
                    (ccp.mu.dot(share_drive) + g * ccp.theta.cwiseProduct(ecp.lambda).sum());
  return t;
}

}  // namespace detail

/// Stationary point of the leader Hamiltonian in p under the followers'
/// response. The cloud share enters through x_c; on the simplex this is
/// 1 - sum x_n.
inline double optimal_price(const SystemConfig& cfg, const PopulationState& pop,
                            const EcpCostate& ecp, const CcpCostate& ccp) {
  const auto t = detail::price_terms(cfg, pop, ecp, ccp);
  const auto& w = cfg.ccp_weights;
  const double N = static_cast<double>(cfg.n_ecps());
  const double Rc = cfg.cloud_power;
  const double B = t.slope;
  const double cloud_gap = cfg.users() * cfg.nominal_rate * pop.cloud() -
                           Rc * (1.0 - t.sum_intercepts);
  const double numer = w.trade * t.sum_intercepts + 2.0 * w.mismatch * N * B * cloud_gap +
                       t.costate_drive;
  return numer / (2.0 * N * B * (w.trade + w.mismatch * Rc * N * B));
}

/// Analytic dH_c/dp under the followers' response.
inline double leader_price_gradient(const SystemConfig& cfg, const PopulationState& pop,
                                    const EcpCostate& ecp, const CcpCostate& ccp, double price) {
  const auto t = detail::price_terms(cfg, pop, ecp, ccp);
  const auto& w = cfg.ccp_weights;
  const double N = static_cast<double>(cfg.n_ecps());
  const double Rc = cfg.cloud_power;
  const double B = t.slope;
  const double sold = t.sum_intercepts - N * B * price;
  const double cloud_gap = cfg.users() * cfg.nominal_rate * pop.cloud() - Rc * (1.0 - sold);
  return Rc * (w.trade * (t.sum_intercepts - 2.0 * N * B * price) +
               2.0 * w.mismatch * N * B * cloud_gap + t.costate_drive);
}

/// Clamp the price to [0, price_cap] and the requests to
/// [0, 1 - kRequestMargin], rescaling them if their sum exceeds that bound.
inline Controls project_controls(const SystemConfig& cfg, Vector requests, double price) {
  constexpr double upper = 1.0 - kRequestMargin;
  price = std::clamp(price, 0.0, cfg.price_cap());
  requests = requests.cwiseMax(0.0).cwiseMin(upper);
  const double total = requests.sum();
  if (total > upper) requests *= upper / total;
  return {{std::move(requests)}, price};
}

/// Leader price first, then the followers' response to the projected price.
inline Controls equilibrium_controls(const SystemConfig& cfg, const PopulationState& pop,
                                     const EcpCostate& ecp, const CcpCostate& ccp) {
  const double price = std::clamp(optimal_price(cfg, pop, ecp, ccp), 0.0, cfg.price_cap());
  return project_controls(cfg, follower_response(cfg, pop, price, ecp).requests, price);
}

}  // namespace edgegame
