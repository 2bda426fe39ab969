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

// Experiment orchestration behind the command-line tool: run a scenario
// under its scheme, emit trajectory CSV and summary JSON, compare schemes
// across learning rates, and sweep single parameters.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edgegame/replicator.hpp"
#include "edgegame/scenario.hpp"
#include "edgegame/solver.hpp"

namespace edgegame {

struct RunResult {
  Trajectory trajectory;
  std::optional<SweepReport> report;  // set for olsec
};

inline RunResult run_scenario(const Scenario& sc) {
  const auto opt = sc.solver_options();
  switch (sc.scheme) {
    case Scheme::olsec: {
      auto [traj, report] = solve_open_loop(sc.config, sc.x0, opt);
      return {std::move(traj), report};
    }
    case Scheme::ssec:
      return {solve_ssec(sc.config, sc.x0, opt), std::nullopt};
    case Scheme::fixed_controls:
      return {simulate_fixed(sc.config, sc.x0, {sc.r0, 0.0}, opt), std::nullopt};
  }
  throw std::logic_error("unhandled scheme");
}

/// Reference state for convergence checks: the closed-form equilibrium
/// under fixed controls, otherwise the state reached at the horizon.
inline PopulationState reference_state(const Scenario& sc, const Trajectory& traj) {
  if (sc.scheme == Scheme::fixed_controls) return analytic_ess(sc.config, sc.r0).shares;
  return traj.final_state();
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Column contract: t, x_1..x_N, x_c, r_1..r_N, r_c, p, u_1..u_N, u_c,
/// U_1..U_N, U_c. Values carry 17 significant digits.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto N = traj.controls.front().allocation.requests.size();
  out << "t";
  for (Eigen::Index n = 1; n <= N; ++n) out << ",x_" << n;
  out << ",x_c";
  for (Eigen::Index n = 1; n <= N; ++n) out << ",r_" << n;
  out << ",r_c,p";
  for (Eigen::Index n = 1; n <= N; ++n) out << ",u_" << n;
  out << ",u_c";
  for (Eigen::Index n = 1; n <= N; ++n) out << ",U_" << n;
  out << ",U_c\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    auto row = [&](const Vector& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
    };
    row(traj.states[k].shares);
    row(traj.controls[k].allocation.requests);
    out << ',' << format_double(traj.controls[k].allocation.cloud_remainder()) << ','
        << format_double(traj.controls[k].price);
    row(traj.utilities[k]);
    row(traj.integral_utilities[k]);
    out << '\n';
  }
}

inline nlohmann::json to_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline nlohmann::json to_json(const SweepReport& r) {
  return {{"iterations", r.iterations},
          {"state_residual", r.state_residual},
          {"costate_terminal_residual", r.costate_terminal_residual},
          {"converged", r.converged}};
}

inline nlohmann::json optional_json(std::optional<double> v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// Summary of a run. Every entry except the verdict and sweep report can be
/// recomputed from the trajectory CSV: equilibrium quantities are the
/// values at the horizon and the convergence time targets the final state.
inline nlohmann::json summarize(const Scenario& sc, const RunResult& run) {
  const auto& traj = run.trajectory;
  const auto N = static_cast<Eigen::Index>(sc.config.n_ecps());
  const Vector& U = traj.integral_utilities.back();
  nlohmann::json j;
  j["scheme"] = std::string(to_string(sc.scheme));
  j["horizon"] = sc.config.horizon;
  j["dt"] = sc.dt;
  j["equilibrium_shares"] = to_json(traj.final_state().shares);
  j["equilibrium_requests"] = to_json(traj.final_controls().allocation.requests);
  j["equilibrium_cloud_remainder"] = traj.final_controls().allocation.cloud_remainder();
  j["equilibrium_price"] = traj.final_controls().price;
  j["eps_convergence"] = sc.eps_convergence;
  j["convergence_time"] =
      optional_json(convergence_time(traj, traj.final_state(), sc.eps_convergence));
  j["integral_utilities"] = {{"ecp", to_json(U.head(N))}, {"ccp", U(N)}};
  j["verdict"] = std::string(to_string(classify(traj, reference_state(sc, traj), sc.eps_convergence)));
  j["sweep_report"] = run.report ? to_json(*run.report) : nlohmann::json(nullptr);
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Runs the scenario and writes trajectory.csv and summary.json to `out_dir`.
inline nlohmann::json cmd_simulate(const Scenario& sc, const std::filesystem::path& out_dir) {
  const RunResult run = run_scenario(sc);
  const nlohmann::json summary = summarize(sc, run);
  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, run.trajectory);
  write_text(out_dir / "trajectory.csv", csv.str());
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

/// Closed-form equilibrium analysis under the scenario's initial requests.
inline nlohmann::json cmd_ess(const Scenario& sc) {
  const auto& cfg = sc.config;
  const EssResult ess = analytic_ess(cfg, sc.r0);
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& z : ess_jacobian_eigen(cfg, sc.r0)) eig.push_back({z.real(), z.imag()});
  return {{"ess_shares", to_json(ess.shares.shares)},
          {"common_utility", ess.common_utility},
          {"theta", theta(cfg, sc.r0)},
          {"eigenvalues", eig},
          {"delay_bound", delay_stability_bound(cfg, sc.r0)}};
}

struct CompareRow {
  double delta = 0.0;
  std::optional<double> time_olsec, time_ssec;
  double ccp_utility_olsec = 0.0, ccp_utility_ssec = 0.0;
  Vector ecp_utility_olsec, ecp_utility_ssec;
  SweepReport report;
};

/// Runs both Stackelberg schemes for every learning rate. Rows are computed
/// concurrently and returned in input order.
inline std::vector<CompareRow> compare_schemes(const Scenario& sc, const std::vector<double>& deltas) {
  if (deltas.empty()) throw InvalidScenario("deltas", "list must be non-empty");
  for (double d : deltas) {
    if (!(d > 0)) throw InvalidScenario("deltas", "learning rates must be > 0");
  }
  std::vector<std::future<CompareRow>> jobs;
  for (double d : deltas) {
    const Scenario variant = with_parameter(sc, "delta", d);
    jobs.push_back(std::async(std::launch::async, [variant, d] {
      const auto opt = variant.solver_options();
      const auto N = static_cast<Eigen::Index>(variant.config.n_ecps());
      auto [olsec, report] = solve_open_loop(variant.config, variant.x0, opt);
      const Trajectory ssec = solve_ssec(variant.config, variant.x0, opt);
      CompareRow row;
      row.delta = d;
      row.time_olsec = convergence_time(olsec, olsec.final_state(), variant.eps_convergence);
      row.time_ssec = convergence_time(ssec, ssec.final_state(), variant.eps_convergence);
      row.ccp_utility_olsec = olsec.integral_utilities.back()(N);
      row.ccp_utility_ssec = ssec.integral_utilities.back()(N);
      row.ecp_utility_olsec = olsec.integral_utilities.back().head(N);
      row.ecp_utility_ssec = ssec.integral_utilities.back().head(N);
      row.report = report;
      return row;
    }));
  }
  std::vector<CompareRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

inline std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "delta,convergence_time_olsec,convergence_time_ssec,U_c_olsec,U_c_ssec,sweep_iterations,"
         "sweep_converged\n";
  auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string{}; };
  for (const auto& r : rows) {
    out << format_double(r.delta) << ',' << opt(r.time_olsec) << ',' << opt(r.time_ssec) << ','
        << format_double(r.ccp_utility_olsec) << ',' << format_double(r.ccp_utility_ssec) << ','
        << r.report.iterations << ',' << (r.report.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

inline nlohmann::json compare_json(const std::vector<CompareRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"delta", r.delta},
                   {"convergence_time_olsec", optional_json(r.time_olsec)},
                   {"convergence_time_ssec", optional_json(r.time_ssec)},
                   {"integral_utility_ccp_olsec", r.ccp_utility_olsec},
                   {"integral_utility_ccp_ssec", r.ccp_utility_ssec},
                   {"integral_utility_ecp_olsec", to_json(r.ecp_utility_olsec)},
                   {"integral_utility_ecp_ssec", to_json(r.ecp_utility_ssec)},
                   {"sweep_report", to_json(r.report)}});
  }
  return out;
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  PopulationState shares;
  double price = 0.0;
  double cloud_remainder = 0.0;
  std::optional<double> convergence_time;
  Verdict verdict = Verdict::unsettled;
  std::optional<SweepReport> report;
};

/// One run per value of `parameter`, computed concurrently and returned in
/// input order.
inline std::vector<SweepRow> sweep_parameter(const Scenario& sc, const std::string& parameter,
                                             const std::vector<double>& values) {
  if (!sweep_parameters().contains(parameter)) {
    throw InvalidScenario("param", "unknown sweep parameter '" + parameter + "'");
  }
  if (values.empty()) throw InvalidScenario("values", "list must be non-empty");
  std::vector<Scenario> variants;
  for (double v : values) variants.push_back(with_parameter(sc, parameter, v));
  std::vector<std::future<SweepRow>> jobs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&variants, &parameter, i, v = values[i]] {
      const Scenario& variant = variants[i];
      const RunResult run = run_scenario(variant);
      const auto& traj = run.trajectory;
      return SweepRow{parameter,
                      v,
                      traj.final_state(),
                      traj.final_controls().price,
                      traj.final_controls().allocation.cloud_remainder(),
                      convergence_time(traj, traj.final_state(), variant.eps_convergence),
                      classify(traj, reference_state(variant, traj), variant.eps_convergence),
                      run.report};
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  const auto N = rows.front().shares.n_ecps();
  out << "parameter,value";
  for (std::size_t n = 1; n <= N; ++n) out << ",x_" << n;
  out << ",x_c,p,r_c,convergence_time,verdict,sweep_converged\n";
  for (const auto& r : rows) {
    out << r.parameter << ',' << format_double(r.value);
    for (Eigen::Index i = 0; i < r.shares.shares.size(); ++i) {
      out << ',' << format_double(r.shares.shares(i));
    }
    out << ',' << format_double(r.price) << ',' << format_double(r.cloud_remainder) << ','
        << (r.convergence_time ? format_double(*r.convergence_time) : std::string{}) << ','
        << to_string(r.verdict) << ','
        << (r.report ? (r.report->converged ? "true" : "false") : "") << '\n';
  }
  return out.str();
}

}  // namespace edgegame
