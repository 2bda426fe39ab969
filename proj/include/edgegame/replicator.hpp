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

// User layer: replicator vector field (plain and delayed), the closed-form
// evolutionary equilibrium, and its stability spectrum.

#pragma once

#include <Eigen/Eigenvalues>

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "edgegame/model.hpp"

namespace edgegame {

/// Which shares weight the population-mean utility in the delayed field.
/// Both agree when the current and delayed states coincide.
enum class DelayedMean {
  /// Mean over delayed utilities weighted by delayed shares. The field then
  /// sums to zero and is affine in the delayed state.
  delayed_shares,
  /// Mean over delayed utilities weighted by current shares.
  current_shares,
};

namespace detail {

inline Vector replicator_kernel(const SystemConfig& cfg, const PopulationState& weights,
                                const PopulationState& delayed, const AllocationState& alloc) {
  const Vector pi = user_utility(cfg, {delayed, alloc, 0.0, 0.0});
  const double mean = mean_utility(weights, pi);
  return cfg.learning_rate * delayed.shares.cwiseProduct((pi.array() - mean).matrix());
}

}  // namespace detail

/// dx_s/dt = delta x_s (pi_s - mean utility).
inline Vector replicator_rhs(const SystemConfig& cfg, const PopulationState& pop,
                             const AllocationState& alloc) {
  return detail::replicator_kernel(cfg, pop, pop, alloc);
}

/// Replicator field where users see the population state with a lag.
/// Utilities and the growth factor use `pop_delayed`; `mode` selects the
/// weights of the mean utility.
inline Vector delayed_replicator_rhs(const SystemConfig& cfg, const PopulationState& pop_now,
                                     const PopulationState& pop_delayed,
                                     const AllocationState& alloc,
                                     DelayedMean mode = DelayedMean::delayed_shares) {
  const auto& weights = mode == DelayedMean::delayed_shares ? pop_delayed : pop_now;
  return detail::replicator_kernel(cfg, weights, pop_delayed, alloc);
}

struct EssResult {
  PopulationState shares;
  double common_utility = 0.0;
};

/// Interior rest point of the replicator field for fixed requests. Every
/// provider's share is proportional to supply / access price, which
/// equalises all user utilities.
inline EssResult analytic_ess(const SystemConfig& cfg, const AllocationState& alloc) {
  const Vector weight = provider_supply(cfg, alloc).cwiseQuotient(access_prices(cfg));
  const double total = weight.sum();
  return {{weight / total}, cfg.mapping_factor * total / cfg.users()};
}

/// Linear system matrix of the expanded dynamics dx/dt = Pi x + pi_o.
/// Independent of the state for fixed requests.
inline Matrix pi_matrix(const SystemConfig& cfg, const AllocationState& alloc) {
  const auto n = static_cast<Eigen::Index>(cfg.n_ecps()) + 1;
  return -theta(cfg, alloc) * Matrix::Identity(n, n);
}

/// Constant term pi_o of the expanded dynamics.
inline Vector pi_offset(const SystemConfig& cfg, const AllocationState& alloc) {
  return cfg.learning_rate * cfg.mapping_factor / cfg.users() *
         provider_supply(cfg, alloc).cwiseQuotient(access_prices(cfg));
}

inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Eigenvalues of Pi. All equal -Theta.
inline std::vector<std::complex<double>> ess_jacobian_eigen(const SystemConfig& cfg,
                                                            const AllocationState& alloc) {
  return eigenvalues(pi_matrix(cfg, alloc));
}

/// Central-difference Jacobian of replicator_rhs at `pop`. Requires every
/// share to exceed `step`.
inline Matrix numerical_jacobian(const SystemConfig& cfg, const PopulationState& pop,
                                 const AllocationState& alloc, double step = 1e-6) {
  const auto n = pop.shares.size();
  Matrix jac(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    PopulationState up = pop, down = pop;
    up.shares(j) += step;
    down.shares(j) -= step;
    jac.col(j) = (replicator_rhs(cfg, up, alloc) - replicator_rhs(cfg, down, alloc)) / (2 * step);
  }
  return jac;
}

/// Largest population delay for which the delayed field keeps the
/// equilibrium asymptotically stable: pi / (2 Theta).
inline double delay_stability_bound(const SystemConfig& cfg, const AllocationState& alloc) {
  return std::numbers::pi / (2.0 * theta(cfg, alloc));
}

/// Replicator field driven by a time-dependent control source.
class ReplicatorField {
 public:
  using ControlSource = std::function<Controls(double)>;

  ReplicatorField(const SystemConfig& cfg, ControlSource source)
      : cfg_(&cfg), source_(std::move(source)) {}

  Vector operator()(double t, const Vector& x) const {
    return replicator_rhs(*cfg_, {x}, source_(t).allocation);
  }

  Vector operator()(double t, const Vector& x, const Vector& x_delayed,
                    DelayedMean mode = DelayedMean::delayed_shares) const {
    return delayed_replicator_rhs(*cfg_, {x}, {x_delayed}, source_(t).allocation, mode);
  }

  Controls controls(double t) const { return source_(t); }
  const SystemConfig& config() const noexcept { return *cfg_; }

 private:
  const SystemConfig* cfg_;
  ControlSource source_;
};

}  // namespace edgegame
