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

// Trajectory solvers: forward simulation under a control law, backward
// costate integration, the relaxed forward-backward sweep for the open-loop
// Stackelberg equilibrium, and the myopic static baseline.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "edgegame/integrate.hpp"
#include "edgegame/model.hpp"
#include "edgegame/replicator.hpp"
#include "edgegame/stackelberg.hpp"

namespace edgegame {

enum class Scheme { olsec, ssec, fixed_controls };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::olsec: return "olsec";
    case Scheme::ssec: return "ssec";
    case Scheme::fixed_controls: return "fixed-controls";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "olsec") return Scheme::olsec;
  if (name == "ssec") return Scheme::ssec;
  if (name == "fixed-controls") return Scheme::fixed_controls;
  return std::nullopt;
}

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<PopulationState> states;
  std::vector<Controls> controls;
  std::vector<EcpCostate> ecp_costates;
  std::vector<CcpCostate> ccp_costates;
  std::vector<Vector> utilities;           // [u_1..u_N, u_c]
  std::vector<Vector> integral_utilities;  // running discounted integrals, same layout

  std::size_t size() const noexcept { return times.size(); }
  const PopulationState& final_state() const { return states.back(); }
  const Controls& final_controls() const { return controls.back(); }
};

struct SweepOptions {
  int max_iter = 500;
  double tol = 1e-8;
  double relaxation = 0.5;  // weight of the fresh costates in (0, 1]
};

struct SweepReport {
  int iterations = 0;
  double state_residual = 0.0;
  double costate_terminal_residual = 0.0;
  bool converged = false;
};

struct SolverOptions {
  double dt = 0.01;
  SweepOptions sweep;
  DelayedMean delayed_mean = DelayedMean::delayed_shares;
};

/// Costates on the time grid, one sample per node.
struct CostatePath {
  std::vector<EcpCostate> ecp;
  std::vector<CcpCostate> ccp;

  static CostatePath zero(std::size_t n_ecps, std::size_t nodes) {
    return {std::vector<EcpCostate>(nodes, EcpCostate::zero(n_ecps)),
            std::vector<CcpCostate>(nodes, CcpCostate::zero(n_ecps))};
  }

  std::size_t size() const noexcept { return ecp.size(); }

  /// Linear interpolation on a grid with spacing dt starting at 0.
  std::pair<EcpCostate, CcpCostate> at(double t, double dt) const {
    const double pos = std::clamp(t / dt, 0.0, static_cast<double>(size() - 1));
    const auto k = std::min(static_cast<std::size_t>(pos), size() - 1);
    const double w = pos - static_cast<double>(k);
    if (w == 0.0 || k + 1 == size()) return {ecp[k], ccp[k]};
    return {EcpCostate{(1 - w) * ecp[k].lambda + w * ecp[k + 1].lambda},
            CcpCostate{(1 - w) * ccp[k].mu + w * ccp[k + 1].mu,
                       (1 - w) * ccp[k].theta + w * ccp[k + 1].theta}};
  }
};

/// Maps (time, population state) to provider decisions.
using ControlLaw = std::function<Controls(double, const PopulationState&)>;

namespace detail {

inline std::size_t n_nodes(const SystemConfig& cfg, double dt) {
  return step_count(0.0, cfg.horizon, dt) + 1;
}

inline ControlLaw stackelberg_law(const SystemConfig& cfg, const CostatePath& costates, double dt) {
  return [&cfg, &costates, dt](double t, const PopulationState& pop) {
    const auto [ecp, ccp] = costates.at(t, dt);
    return equilibrium_controls(cfg, pop, ecp, ccp);
  };
}

inline Vector pack(const EcpCostate& ecp, const CcpCostate& ccp) {
  const auto n = ccp.mu.size();
  Vector z(2 * n * n + n);
  z.head(n * n) = ecp.lambda.reshaped();
  z.segment(n * n, n) = ccp.mu;
  z.tail(n * n) = ccp.theta.reshaped();
  return z;
}

inline std::pair<EcpCostate, CcpCostate> unpack(const Vector& z, Eigen::Index n) {
  return {EcpCostate{z.head(n * n).reshaped(n, n)},
          CcpCostate{z.segment(n * n, n), z.tail(n * n).reshaped(n, n)}};
}

}  // namespace detail

/// Integrates the population under `law` over [0, T] and records controls,
/// utilities and running discounted integrals at every grid node.
/// `costates` are stored alongside and must have one sample per node.
inline Trajectory simulate(const SystemConfig& cfg, const PopulationState& x0, const ControlLaw& law,
                           const CostatePath& costates, const SolverOptions& opt = {}) {
  const auto field = [&](double t, const Vector& x, const Vector& x_delayed) {
    const Controls c = law(t, {x});
    return delayed_replicator_rhs(cfg, {x}, {x_delayed}, c.allocation, opt.delayed_mean);
  };
  StatePath path = integrate_dde(field, x0.shares, cfg.population_delay, 0.0, cfg.horizon, opt.dt,
                                 {.simplex = true});

  Trajectory traj;
  traj.dt = opt.dt;
  traj.times = std::move(path.times);
  traj.ecp_costates = costates.ecp;
  traj.ccp_costates = costates.ccp;
  const std::size_t nodes = traj.times.size();
  const auto N = static_cast<Eigen::Index>(cfg.n_ecps());
  traj.states.reserve(nodes);
  traj.controls.reserve(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    traj.states.push_back({std::move(path.states[k])});
    traj.controls.push_back(law(traj.times[k], traj.states[k]));
    const MarketSnapshot snap{traj.states[k], traj.controls[k].allocation, traj.controls[k].price,
                              traj.times[k]};
    Vector u(N + 1);
    for (Eigen::Index n = 0; n < N; ++n) u(n) = ecp_instant_utility(cfg, snap, static_cast<std::size_t>(n));
    u(N) = ccp_instant_utility(cfg, snap);
    traj.utilities.push_back(std::move(u));
  }
  traj.integral_utilities.assign(nodes, Vector::Zero(N + 1));
  for (std::size_t k = 1; k < nodes; ++k) {
    const double a = std::exp(-cfg.discount_rate * traj.times[k - 1]);
    const double b = std::exp(-cfg.discount_rate * traj.times[k]);
    traj.integral_utilities[k] = traj.integral_utilities[k - 1] +
                                 0.5 * opt.dt * (a * traj.utilities[k - 1] + b * traj.utilities[k]);
  }
  return traj;
}

/// Backward RK4 integration of all costates from zero at T along the given
/// control path. Theta between nodes follows the linearly interpolated
/// requests.
inline CostatePath backward_costates(const SystemConfig& cfg, const std::vector<Controls>& controls,
                                     double dt) {
  const std::size_t nodes = controls.size();
  const auto N = static_cast<Eigen::Index>(cfg.n_ecps());
  auto requests_at = [&](double t) {
    const double pos = std::clamp(t / dt, 0.0, static_cast<double>(nodes - 1));
    const auto k = std::min(static_cast<std::size_t>(pos), nodes - 1);
    const double w = pos - static_cast<double>(k);
    if (w == 0.0 || k + 1 == nodes) return controls[k].allocation;
    return AllocationState{(1 - w) * controls[k].allocation.requests +
                           w * controls[k + 1].allocation.requests};
  };
  const auto field = [&](double t, const Vector& z) {
    const auto [ecp, ccp] = detail::unpack(z, N);
    const MarketSnapshot snap{PopulationState{}, requests_at(t), 0.0, t};
    const auto ccp_rate = ccp_costate_rhs(cfg, snap, ccp);
    return detail::pack(EcpCostate{ecp_costate_rhs(cfg, snap, ecp)},
                        CcpCostate{ccp_rate.mu, ccp_rate.theta});
  };
  const double T = static_cast<double>(nodes - 1) * dt;
  const Vector terminal = Vector::Zero(2 * N * N + N);
  StatePath path = integrate_ode(field, terminal, T, 0.0, -dt);

  CostatePath out;
  out.ecp.resize(nodes);
  out.ccp.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    auto [ecp, ccp] = detail::unpack(path.states[j], N);
    out.ecp[nodes - 1 - j] = std::move(ecp);
    out.ccp[nodes - 1 - j] = std::move(ccp);
  }
  return out;
}

inline double max_state_change(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a.states[k].shares - b.states[k].shares).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Forward pass of the Stackelberg controls with the given costates.
inline Trajectory forward_pass(const SystemConfig& cfg, const PopulationState& x0,
                               const CostatePath& costates, const SolverOptions& opt = {}) {
  return simulate(cfg, x0, detail::stackelberg_law(cfg, costates, opt.dt), costates, opt);
}

/// Open-loop Stackelberg equilibrium by forward-backward sweeping. Costates
/// start at zero; each sweep integrates the population forward under the
/// closed-form controls, integrates the costates backward from zero terminal
/// values, and blends them into the previous costates with weight
/// `relaxation`. Stops once the largest state change between sweeps falls
/// below `tol`.
inline std::pair<Trajectory, SweepReport> solve_open_loop(const SystemConfig& cfg,
                                                          const PopulationState& x0,
                                                          const SolverOptions& opt = {}) {
  const auto& sweep = opt.sweep;
  if (!(sweep.relaxation > 0.0 && sweep.relaxation <= 1.0)) {
    throw std::invalid_argument("relaxation must lie in (0, 1]");
  }
  const std::size_t nodes = detail::n_nodes(cfg, opt.dt);
  CostatePath costates = CostatePath::zero(cfg.n_ecps(), nodes);
  SweepReport report;
  Trajectory current = forward_pass(cfg, x0, costates, opt);
  for (int it = 1; it <= sweep.max_iter; ++it) {
    const CostatePath fresh = backward_costates(cfg, current.controls, opt.dt);
    const double w = sweep.relaxation;
    for (std::size_t k = 0; k < nodes; ++k) {
      costates.ecp[k].lambda = w * fresh.ecp[k].lambda + (1 - w) * costates.ecp[k].lambda;
      costates.ccp[k].mu = w * fresh.ccp[k].mu + (1 - w) * costates.ccp[k].mu;
      costates.ccp[k].theta = w * fresh.ccp[k].theta + (1 - w) * costates.ccp[k].theta;
    }
    Trajectory next = forward_pass(cfg, x0, costates, opt);
    report.iterations = it;
    report.state_residual = max_state_change(next, current);
    current = std::move(next);
    if (report.state_residual < sweep.tol) {
      report.converged = true;
      break;
    }
  }
  report.costate_terminal_residual =
      std::max({current.ecp_costates.back().lambda.cwiseAbs().maxCoeff(),
                current.ccp_costates.back().mu.cwiseAbs().maxCoeff(),
                current.ccp_costates.back().theta.cwiseAbs().maxCoeff()});
  return {std::move(current), report};
}

/// Largest state change when the forward pass is re-run with costates
/// integrated backward along the trajectory's own controls.
inline double frozen_costate_residual(const SystemConfig& cfg, const Trajectory& traj,
                                      const SolverOptions& opt = {}) {
  const CostatePath fresh = backward_costates(cfg, traj.controls, traj.dt);
  return max_state_change(forward_pass(cfg, traj.states.front(), fresh, opt), traj);
}

/// Myopic baseline: both layers play the instantaneous Stackelberg game
/// with all costates at zero.
inline Trajectory solve_ssec(const SystemConfig& cfg, const PopulationState& x0,
                             const SolverOptions& opt = {}) {
  return forward_pass(cfg, x0, CostatePath::zero(cfg.n_ecps(), detail::n_nodes(cfg, opt.dt)), opt);
}

/// Population dynamics under constant controls.
inline Trajectory simulate_fixed(const SystemConfig& cfg, const PopulationState& x0,
                                 const Controls& controls, const SolverOptions& opt = {}) {
  return simulate(cfg, x0, [controls](double, const PopulationState&) { return controls; },
                  CostatePath::zero(cfg.n_ecps(), detail::n_nodes(cfg, opt.dt)), opt);
}

/// First grid time after which ||x(t) - target||_inf < eps holds through the
/// end of the horizon; nullopt if it does not hold at the final node.
inline std::optional<double> convergence_time(const Trajectory& traj, const PopulationState& target,
                                              double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if ((traj.states[k].shares - target.shares).cwiseAbs().maxCoeff() >= eps) last_outside = k;
  }
  if (!last_outside) return traj.times.front();
  if (*last_outside + 1 == traj.size()) return std::nullopt;
  return traj.times[*last_outside + 1];
}

struct EcpId {
  std::size_t n;
};
struct CloudId {};
using ProviderId = std::variant<EcpId, CloudId>;

/// Trapezoidal quadrature of exp(-rho t) u(t) over the trajectory grid.
inline double integral_utility(const Trajectory& traj, ProviderId who, double rho) {
  const auto column = std::visit(
      [&](auto id) -> Eigen::Index {
        if constexpr (std::is_same_v<decltype(id), EcpId>) return static_cast<Eigen::Index>(id.n);
        else return traj.utilities.front().size() - 1;
      },
      who);
  double total = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double a = std::exp(-rho * traj.times[k - 1]) * traj.utilities[k - 1](column);
    const double b = std::exp(-rho * traj.times[k]) * traj.utilities[k](column);
    total += 0.5 * (traj.times[k] - traj.times[k - 1]) * (a + b);
  }
  return total;
}

/// Half the peak-to-peak range of every share over the last `fraction` of
/// the horizon.
inline Vector oscillation_amplitude(const Trajectory& traj, double fraction = 0.2) {
  const double start = traj.times.back() - fraction * (traj.times.back() - traj.times.front());
  Vector lo = Vector::Constant(traj.states.front().shares.size(), INFINITY);
  Vector hi = -lo;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] + 1e-12 < start) continue;
    lo = lo.cwiseMin(traj.states[k].shares);
    hi = hi.cwiseMax(traj.states[k].shares);
  }
  return (hi - lo) / 2;
}

enum class Verdict { converged, oscillating, unsettled };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::oscillating: return "oscillating";
    case Verdict::unsettled: return "unsettled";
  }
  return "?";
}

/// Oscillating when some share swings by more than 10% of its reference
/// value over the final 20% of the horizon; converged when every state in
/// that window is within eps of the reference.
inline Verdict classify(const Trajectory& traj, const PopulationState& reference, double eps) {
  const Vector amplitude = oscillation_amplitude(traj, 0.2);
  if ((amplitude.array() > 0.1 * reference.shares.array()).any()) return Verdict::oscillating;
  const double start = 0.8 * traj.times.back();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] + 1e-12 < start) continue;
    if ((traj.states[k].shares - reference.shares).cwiseAbs().maxCoeff() >= eps) {
      return Verdict::unsettled;
    }
  }
  return Verdict::converged;
}

}  // namespace edgegame
