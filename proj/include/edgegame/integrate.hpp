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

// Fixed-step classical Runge-Kutta integration for ODEs and for delay
// equations with a constant prehistory.

#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgegame/errors.hpp"
#include "edgegame/model.hpp"

namespace edgegame {

struct StatePath {
  std::vector<double> times;
  std::vector<Vector> states;
};

struct StepOptions {
  /// Floor shares at kShareFloor and renormalise after every step.
  bool simplex = false;
  double blowup_limit = 1e12;
};

inline constexpr double kShareFloor = 1e-12;

/// Keeps a population vector interior and on the simplex.
inline void enforce_simplex(Vector& x) {
  x = x.cwiseMax(kShareFloor);
  const double total = x.sum();
  if (std::abs(total - 1.0) > 1e-12) x /= total;
}

inline void check_bounded(const Vector& x, double limit, double t) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > limit) {
    throw BlowUp("state exceeded " + std::to_string(limit) + " at t=" + std::to_string(t));
  }
}

/// Number of steps of size |dt| covering [t0, t1]. The span must be a whole
/// multiple of the step.
inline std::size_t step_count(double t0, double t1, double dt) {
  if (dt == 0.0 || (t1 - t0) / dt < 0.0) throw std::invalid_argument("step has wrong sign or is zero");
  const double exact = (t1 - t0) / dt;
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    throw std::invalid_argument("time span is not a multiple of the step");
  }
  return static_cast<std::size_t>(rounded);
}

/// One classical RK4 step for dx/dt = f(t, x).
template <class Rhs>
Vector rk4_step(const Rhs& f, double t, const Vector& x, double dt) {
  const double half = dt / 2;
  const Vector k1 = f(t, x);
  const Vector k2 = f(t + half, Vector(x + half * k1));
  const Vector k3 = f(t + half, Vector(x + half * k2));
  const Vector k4 = f(t + dt, Vector(x + dt * k3));
  return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Integrates from t0 to t1 (t1 < t0 with negative dt runs backward).
/// Grid times are t0 + k dt.
template <class Rhs>
StatePath integrate_ode(const Rhs& f, Vector x0, double t0, double t1, double dt,
                        StepOptions opt = {}) {
  const std::size_t steps = step_count(t0, t1, dt);
  StatePath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  if (opt.simplex) enforce_simplex(x0);
  path.times.push_back(t0);
  path.states.push_back(std::move(x0));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    Vector next = rk4_step(f, t, path.states.back(), dt);
    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    check_bounded(next, opt.blowup_limit, t_next);
    if (opt.simplex) enforce_simplex(next);
    path.times.push_back(t_next);
    path.states.push_back(std::move(next));
  }
  return path;
}

/// Past states needed by a delay equation: the grid nodes of the last
/// `delay + 2 dt` time units with their derivatives, plus the constant
/// prehistory before t0.
class HistoryRing {
 public:
  HistoryRing(Vector prehistory, double t0, double dt, double delay)
      : prehistory_(std::move(prehistory)),
        t0_(t0),
        dt_(dt),
        capacity_(static_cast<std::size_t>(std::ceil(delay / dt)) + 3) {}

  void push(Vector x, Vector xdot) {
    nodes_.push_back({std::move(x), std::move(xdot)});
    ++pushed_;
    if (nodes_.size() > capacity_) nodes_.pop_front();
  }

  /// State at time s <= latest node + dt. Nodes are returned exactly,
  /// interior points use cubic Hermite interpolation, and points past the
  /// newest node extrapolate linearly along its derivative.
  Vector at(double s) const {
    if (s <= t0_) return prehistory_;
    const double pos = (s - t0_) / dt_;
    const double node = std::round(pos);
    const std::size_t newest = pushed_ - 1;
    if (std::abs(pos - node) < 1e-9 && static_cast<std::size_t>(node) <= newest) {
      return lookup(static_cast<std::size_t>(node)).x;
    }
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double theta = pos - static_cast<double>(k);
    const Node& a = lookup(std::min(k, newest));
    if (k >= newest) return a.x + (s - t0_ - static_cast<double>(newest) * dt_) * a.xdot;
    const Node& b = lookup(k + 1);
    const double t2 = theta * theta, t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * a.x + (t3 - 2 * t2 + theta) * dt_ * a.xdot +
           (-2 * t3 + 3 * t2) * b.x + (t3 - t2) * dt_ * b.xdot;
  }

 private:
  struct Node {
    Vector x;
    Vector xdot;
  };

  const Node& lookup(std::size_t index) const {
    const std::size_t oldest = pushed_ - nodes_.size();
    if (index < oldest) throw std::logic_error("history ring too short for requested delay");
    return nodes_[index - oldest];
  }

  Vector prehistory_;
  double t0_;
  double dt_;
  std::size_t capacity_;
  std::size_t pushed_ = 0;
  std::deque<Node> nodes_;
};

/// Method-of-steps RK4 for dx/dt = f(t, x(t), x(t - delay)) with
/// x(t) = x0 on [t0 - delay, t0]. With delay == 0 the delayed argument is
/// the stage state itself, so the result matches integrate_ode on
/// g(t, x) = f(t, x, x).
template <class DelayedRhs>
StatePath integrate_dde(const DelayedRhs& f, Vector x0, double delay, double t0, double t1,
                        double dt, StepOptions opt = {}) {
  if (delay < 0.0) throw std::invalid_argument("delay must be >= 0");
  if (dt <= 0.0) throw std::invalid_argument("dde integration runs forward only");
  if (delay == 0.0) {
    return integrate_ode([&f](double t, const Vector& x) { return f(t, x, x); }, std::move(x0),
                         t0, t1, dt, opt);
  }
  const std::size_t steps = step_count(t0, t1, dt);
  if (opt.simplex) enforce_simplex(x0);
  HistoryRing history(x0, t0, dt, delay);
  auto delayed = [&](double s) {
    Vector y = history.at(s - delay);
    if (opt.simplex) enforce_simplex(y);
    return y;
  };

  StatePath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.times.push_back(t0);
  path.states.push_back(x0);
  Vector x = std::move(x0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double half = dt / 2;
    const Vector k1 = f(t, x, delayed(t));
    history.push(x, k1);
    const Vector k2 = f(t + half, Vector(x + half * k1), delayed(t + half));
    const Vector k3 = f(t + half, Vector(x + half * k2), delayed(t + half));
    const Vector k4 = f(t + dt, Vector(x + dt * k3), delayed(t + dt));
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    check_bounded(x, opt.blowup_limit, t_next);
    if (opt.simplex) enforce_simplex(x);
    path.times.push_back(t_next);
    path.states.push_back(x);
  }
  return path;
}

}  // namespace edgegame
