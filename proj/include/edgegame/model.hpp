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

// Static market parameters and the instantaneous quantities derived from a
// market snapshot: per-user compute, user utilities, provider utilities and
// the aggregate rate Theta that governs the replicator dynamics.
//
// Indexing: edge providers are 0..N-1. Population vectors have length N+1
// with the cloud share stored last.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "edgegame/errors.hpp"

namespace edgegame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weights of a provider's utility: revenue from subscribed users, the
/// compute trade term, and the supply/demand mismatch penalty.
struct UtilityWeights {
  double revenue = 1.0;
  double trade = 1.0;
  double mismatch = 1.0;
};

struct SystemConfig {
  std::size_t n_users = 100;   // K
  Vector ecp_power;            // R_n, kH/s
  Vector ecp_access_price;     // p_n
  double cloud_power = 2.0;    // R_c
  double cloud_access_price = 0.2;  // p_c
  double learning_rate = 1.0;  // delta
  double mapping_factor = 1.0;      // beta
  double discount_rate = 0.1;       // rho
  UtilityWeights ecp_weights;       // eta_1..3
  UtilityWeights ccp_weights;       // xi_1..3
  double nominal_rate = 0.05;       // phi
  double horizon = 50.0;            // T
  double population_delay = 0.0;    // tau_x
  std::optional<double> price_cap_override;

  std::size_t n_ecps() const noexcept { return static_cast<std::size_t>(ecp_power.size()); }
  double users() const noexcept { return static_cast<double>(n_users); }

  /// Upper bound on the unit cloud price. Defaults to ten times the largest
  /// access price in the market.
  double price_cap() const {
    if (price_cap_override) return *price_cap_override;
    return 10.0 * std::max(ecp_access_price.maxCoeff(), cloud_access_price);
  }

  /// delta * beta / K, the factor shared by Theta and the expanded dynamics.
  double rate_scale() const noexcept { return learning_rate * mapping_factor / users(); }

  /// Throws InvalidScenario naming the first violated field.
  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw InvalidScenario(field, what);
    };
    const auto n = ecp_power.size();
    require(n > 0, "n_ecps", "at least one edge provider is required");
    require(n_users > 0, "n_users", "must be positive");
    require(ecp_access_price.size() == n, "ecp_access_price", "length must equal n_ecps");
    require((ecp_power.array() > 0).all(), "ecp_power", "entries must be > 0");
    require((ecp_access_price.array() > 0).all(), "ecp_access_price", "entries must be > 0");
    require(cloud_power >= ecp_power.maxCoeff(), "cloud_power",
            "must be at least every edge provider's power");
    require(cloud_access_price > 0, "cloud_access_price", "must be > 0");
    require(learning_rate > 0, "learning_rate", "must be > 0");
    require(mapping_factor > 0, "mapping_factor", "must be > 0");
    require(discount_rate > 0, "discount_rate", "must be > 0");
    for (const auto& [w, name] : {std::pair{ecp_weights, "ecp_weights"},
                                  std::pair{ccp_weights, "ccp_weights"}}) {
      require(w.revenue > 0 && w.trade > 0 && w.mismatch > 0, name, "weights must be > 0");
    }
    require(nominal_rate > 0, "nominal_rate", "must be > 0");
    require(horizon > 0, "horizon", "must be > 0");
    require(population_delay >= 0, "population_delay", "must be >= 0");
    require(!price_cap_override || *price_cap_override > 0, "price_cap", "must be > 0");
  }
};

/// Shares [x_1..x_N, x_c] of the user population.
struct PopulationState {
  Vector shares;

  std::size_t size() const noexcept { return static_cast<std::size_t>(shares.size()); }
  std::size_t n_ecps() const noexcept { return size() - 1; }
  double ecp(std::size_t n) const { return shares(static_cast<Eigen::Index>(n)); }
  double cloud() const { return shares(shares.size() - 1); }
  auto ecp_shares() const { return shares.head(shares.size() - 1); }

  bool on_simplex(double tol = 1e-12) const {
    return (shares.array() >= 0).all() && std::abs(shares.sum() - 1.0) <= tol;
  }
  bool interior() const { return (shares.array() > 0).all(); }
};

/// Fractions r_n of cloud compute requested by each edge provider.
struct AllocationState {
  Vector requests;

  std::size_t n_ecps() const noexcept { return static_cast<std::size_t>(requests.size()); }
  double cloud_remainder() const { return 1.0 - requests.sum(); }

  bool feasible(double tol = 1e-12) const {
    return (requests.array() >= -tol).all() && (requests.array() < 1.0).all() &&
           cloud_remainder() >= -tol;
  }

  static AllocationState zero(std::size_t n) { return {Vector::Zero(static_cast<Eigen::Index>(n))}; }
};

/// Provider decisions at one instant: edge requests and the unit cloud price.
struct Controls {
  AllocationState allocation;
  double price = 0.0;
};

struct MarketSnapshot {
  PopulationState population;
  AllocationState allocation;
  double price = 0.0;  // unit cloud compute price p
  double time = 0.0;
};

/// Compute supplied by each provider: R_n + R_c r_n for edges, R_c r_c for
/// the cloud. Length N+1.
inline Vector provider_supply(const SystemConfig& cfg, const AllocationState& alloc) {
  const auto n = static_cast<Eigen::Index>(cfg.n_ecps());
  Vector supply(n + 1);
  supply.head(n) = cfg.ecp_power + cfg.cloud_power * alloc.requests;
  supply(n) = cfg.cloud_power * alloc.cloud_remainder();
  return supply;
}

/// Access prices [p_1..p_N, p_c].
inline Vector access_prices(const SystemConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cfg.n_ecps());
  Vector prices(n + 1);
  prices.head(n) = cfg.ecp_access_price;
  prices(n) = cfg.cloud_access_price;
  return prices;
}

/// Per-user compute omega_s = supply_s / (K x_s). A provider with no users
/// and no supply yields 0; no users but positive supply is a ZeroShare.
inline Vector per_user_power(const SystemConfig& cfg, const MarketSnapshot& snap) {
  const Vector supply = provider_supply(cfg, snap.allocation);
  const Vector& x = snap.population.shares;
  Vector omega(supply.size());
  for (Eigen::Index s = 0; s < supply.size(); ++s) {
    if (x(s) != 0.0) {
      omega(s) = supply(s) / (cfg.users() * x(s));
    } else if (supply(s) == 0.0) {
      omega(s) = 0.0;
    } else {
      throw ZeroShare("share " + std::to_string(s) + " is zero with positive supply");
    }
  }
  return omega;
}

/// User utilities pi_s = beta omega_s / price_s.
inline Vector user_utility(const SystemConfig& cfg, const MarketSnapshot& snap) {
  return cfg.mapping_factor * per_user_power(cfg, snap).cwiseQuotient(access_prices(cfg));
}

inline double mean_utility(const PopulationState& pop, const Vector& utils) {
  return pop.shares.dot(utils);
}

/// Aggregate rate Theta = (delta beta / K) * sum_s supply_s / price_s.
inline double theta(const SystemConfig& cfg, const AllocationState& alloc) {
  return cfg.rate_scale() * provider_supply(cfg, alloc).cwiseQuotient(access_prices(cfg)).sum();
}

/// Instantaneous utility of edge provider n: subscription revenue minus the
/// cloud purchase and a quadratic demand/supply mismatch penalty.
inline double ecp_instant_utility(const SystemConfig& cfg, const MarketSnapshot& snap,
                                  std::size_t n) {
  const auto& w = cfg.ecp_weights;
  const auto i = static_cast<Eigen::Index>(n);
  const double x = snap.population.ecp(n);
  const double r = snap.allocation.requests(i);
  const double K = cfg.users();
  const double gap = K * cfg.nominal_rate * x - (cfg.ecp_power(i) + cfg.cloud_power * r);
  return w.revenue * cfg.ecp_access_price(i) * K * x -
         w.trade * cfg.cloud_power * snap.price * r - w.mismatch * gap * gap;
}

/// Instantaneous utility of the cloud provider: direct subscription revenue
/// plus compute sales minus its own mismatch penalty.
inline double ccp_instant_utility(const SystemConfig& cfg, const MarketSnapshot& snap) {
  const auto& w = cfg.ccp_weights;
  const double K = cfg.users();
  const double xc = snap.population.cloud();
  const double sold = snap.allocation.requests.sum();
  const double gap = K * cfg.nominal_rate * xc - cfg.cloud_power * (1.0 - sold);
  return w.revenue * cfg.cloud_access_price * K * xc +
         w.trade * cfg.cloud_power * snap.price * sold - w.mismatch * gap * gap;
}

}  // namespace edgegame
