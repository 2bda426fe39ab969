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

// Scenario documents: JSON mirror of SystemConfig plus initial conditions,
// numerical settings and parameter sweep blocks.

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "edgegame/errors.hpp"
#include "edgegame/model.hpp"
#include "edgegame/solver.hpp"

namespace edgegame {

struct SweepBlock {
  std::string parameter;
  std::vector<double> values;
};

struct Scenario {
  SystemConfig config;
  PopulationState x0;
  AllocationState r0;
  double dt = 0.01;
  double eps_convergence = 1e-3;
  Scheme scheme = Scheme::olsec;
  std::vector<SweepBlock> sweeps;
  SweepOptions sweep_solver;
  DelayedMean delayed_mean = DelayedMean::delayed_shares;

  SolverOptions solver_options() const { return {dt, sweep_solver, delayed_mean}; }

  /// Throws InvalidScenario naming the offending field.
  void validate() const {
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.n_ecps());
    if (x0.shares.size() != n + 1) throw InvalidScenario("x0", "length must be n_ecps + 1");
    if (!x0.on_simplex(1e-9)) throw InvalidScenario("x0", "shares must be >= 0 and sum to 1");
    if (!x0.interior()) throw InvalidScenario("x0", "every share must be > 0");
    if (r0.requests.size() != n) throw InvalidScenario("r0", "length must equal n_ecps");
    if (!r0.feasible()) throw InvalidScenario("r0", "requests must lie in [0,1) with sum <= 1");
    if (!(dt > 0)) throw InvalidScenario("dt", "must be > 0");
    const double steps = config.horizon / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      throw InvalidScenario("dt", "horizon must be a whole number of steps");
    }
    if (!(eps_convergence > 0)) throw InvalidScenario("eps_convergence", "must be > 0");
    if (sweep_solver.max_iter < 1) throw InvalidScenario("max_iter", "must be >= 1");
    if (!(sweep_solver.tol > 0)) throw InvalidScenario("tolerance", "must be > 0");
    if (!(sweep_solver.relaxation > 0 && sweep_solver.relaxation <= 1)) {
      throw InvalidScenario("relaxation", "must lie in (0, 1]");
    }
    for (const auto& block : sweeps) {
      if (block.values.empty()) throw InvalidScenario("sweeps", "values must be non-empty");
    }
  }
};

/// Parameters accepted by sweep blocks.
inline const std::set<std::string>& sweep_parameters() {
  static const std::set<std::string> names{"R_c", "p_c", "tau_x", "delta"};
  return names;
}

/// Copy of `base` with one parameter replaced, validated.
inline Scenario with_parameter(Scenario base, const std::string& name, double value) {
  if (name == "R_c") base.config.cloud_power = value;
  else if (name == "p_c") base.config.cloud_access_price = value;
  else if (name == "tau_x") base.config.population_delay = value;
  else if (name == "delta") base.config.learning_rate = value;
  else throw InvalidScenario("parameter", "unknown sweep parameter '" + name + "'");
  base.validate();
  return base;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field)) throw InvalidScenario(field, "missing");
  return doc.at(field);
}

inline double as_number(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) throw InvalidScenario(field, "must be a number");
  return v.get<double>();
}

inline Vector as_vector(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array()) throw InvalidScenario(field, "must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_number(v[i], field);
  return out;
}

inline UtilityWeights as_weights(const nlohmann::json& v, const std::string& field) {
  const Vector w = as_vector(v, field);
  if (w.size() != 3) throw InvalidScenario(field, "must hold exactly three weights");
  return {w(0), w(1), w(2)};
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
  using detail::as_number;
  using detail::as_vector;
  using detail::require_field;
  if (!doc.is_object()) throw InvalidScenario("scenario", "document must be a JSON object");

  static const std::set<std::string> known{
      "n_ecps",        "n_users",         "ecp_power",     "ecp_access_price",
      "cloud_power",   "cloud_access_price", "learning_rate", "mapping_factor",
      "discount_rate", "ecp_weights",     "ccp_weights",   "nominal_rate",
      "horizon",       "population_delay", "x0",           "r0",
      "dt",            "eps_convergence", "scheme",        "sweeps",
      "price_cap",     "max_iter",        "tolerance",     "relaxation",
      "delayed_mean"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw InvalidScenario(key, "unknown field");
  }

  Scenario sc;
  auto& cfg = sc.config;
  const auto& n_ecps = require_field(doc, "n_ecps");
  if (!n_ecps.is_number_integer() || n_ecps.get<long long>() < 1) {
    throw InvalidScenario("n_ecps", "must be a positive integer");
  }
  const auto& n_users = require_field(doc, "n_users");
  if (!n_users.is_number_integer() || n_users.get<long long>() < 1) {
    throw InvalidScenario("n_users", "must be a positive integer");
  }
  cfg.n_users = n_users.get<std::size_t>();
  cfg.ecp_power = as_vector(require_field(doc, "ecp_power"), "ecp_power");
  if (cfg.ecp_power.size() != n_ecps.get<Eigen::Index>()) {
    throw InvalidScenario("ecp_power", "length must equal n_ecps");
  }
  cfg.ecp_access_price = as_vector(require_field(doc, "ecp_access_price"), "ecp_access_price");
  cfg.cloud_power = as_number(require_field(doc, "cloud_power"), "cloud_power");
  cfg.cloud_access_price = as_number(require_field(doc, "cloud_access_price"), "cloud_access_price");
  cfg.learning_rate = as_number(require_field(doc, "learning_rate"), "learning_rate");
  cfg.mapping_factor = as_number(require_field(doc, "mapping_factor"), "mapping_factor");
  cfg.discount_rate = as_number(require_field(doc, "discount_rate"), "discount_rate");
  cfg.ecp_weights = detail::as_weights(require_field(doc, "ecp_weights"), "ecp_weights");
  cfg.ccp_weights = detail::as_weights(require_field(doc, "ccp_weights"), "ccp_weights");
  cfg.nominal_rate = as_number(require_field(doc, "nominal_rate"), "nominal_rate");
  cfg.horizon = as_number(require_field(doc, "horizon"), "horizon");
  if (doc.contains("population_delay")) {
    cfg.population_delay = as_number(doc["population_delay"], "population_delay");
  }
  if (doc.contains("price_cap")) cfg.price_cap_override = as_number(doc["price_cap"], "price_cap");

  sc.x0 = {as_vector(require_field(doc, "x0"), "x0")};
  sc.r0 = doc.contains("r0") ? AllocationState{as_vector(doc["r0"], "r0")}
                             : AllocationState::zero(cfg.n_ecps());
  if (doc.contains("dt")) sc.dt = as_number(doc["dt"], "dt");
  if (doc.contains("eps_convergence")) {
    sc.eps_convergence = as_number(doc["eps_convergence"], "eps_convergence");
  }
  if (doc.contains("scheme")) {
    const auto& v = doc["scheme"];
    const auto scheme = v.is_string() ? parse_scheme(v.get<std::string>()) : std::nullopt;
    if (!scheme) throw InvalidScenario("scheme", "must be one of olsec, ssec, fixed-controls");
    sc.scheme = *scheme;
  }
  if (doc.contains("max_iter")) {
    if (!doc["max_iter"].is_number_integer()) throw InvalidScenario("max_iter", "must be an integer");
    sc.sweep_solver.max_iter = doc["max_iter"].get<int>();
  }
  if (doc.contains("tolerance")) sc.sweep_solver.tol = as_number(doc["tolerance"], "tolerance");
  if (doc.contains("relaxation")) {
    sc.sweep_solver.relaxation = as_number(doc["relaxation"], "relaxation");
  }
  if (doc.contains("delayed_mean")) {
    const auto& v = doc["delayed_mean"];
    if (v == "delayed-shares") sc.delayed_mean = DelayedMean::delayed_shares;
    else if (v == "current-shares") sc.delayed_mean = DelayedMean::current_shares;
    else throw InvalidScenario("delayed_mean", "must be delayed-shares or current-shares");
  }
  if (doc.contains("sweeps")) {
    const auto& blocks = doc["sweeps"];
    if (!blocks.is_array()) throw InvalidScenario("sweeps", "must be an array");
    for (const auto& b : blocks) {
      if (!b.is_object() || !b.contains("parameter") || !b.contains("values") ||
          b.size() != 2 || !b["parameter"].is_string()) {
        throw InvalidScenario("sweeps", "each block needs exactly 'parameter' and 'values'");
      }
      SweepBlock block{b["parameter"].get<std::string>(), {}};
      if (!sweep_parameters().contains(block.parameter)) {
        throw InvalidScenario("sweeps", "unknown parameter '" + block.parameter + "'");
      }
      const Vector values = as_vector(b["values"], "sweeps");
      block.values.assign(values.data(), values.data() + values.size());
      sc.sweeps.push_back(std::move(block));
    }
  }
  sc.validate();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidScenario("scenario", "cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidScenario("scenario", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace edgegame
