#ifndef GABPFIX_REPORT_HPP
#define GABPFIX_REPORT_HPP

// CSV traces and JSON run reports. Key order in JSON is fixed by insertion.

#include <json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gabpfix/experiments.hpp"
#include "gabpfix/matrix_market.hpp"
#include "gabpfix/outer_solver.hpp"

namespace gabpfix {

using Json = nlohmann::ordered_json;

/// Finite values in shortest round-trip form, non-finite as nan/inf/-inf.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

/// Columns: iteration, x_0 .. x_{n-1}.
inline void write_mean_trace_csv(std::ostream& out, const std::vector<DenseVector>& trace) {
  const std::size_t n = trace.empty() ? 0 : trace.front().size();
  out << "iteration";
  for (std::size_t i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out << t + 1;
    for (double v : trace[t]) out << ',' << csv_number(v);
    out << '\n';
  }
}

/// Columns: iteration, max_message_change.
inline void write_gabp_trace_csv(std::ostream& out, const GabpResult& r) {
  out << "iteration,max_message_change\n";
  for (std::size_t t = 0; t < r.residual_history.size(); ++t)
    out << t + 1 << ',' << csv_number(r.residual_history[t]) << '\n';
}

/// Columns: outer, residual_inf, inner_iterations.
inline void write_outer_trace_csv(std::ostream& out, const FixedSolveReport& r) {
  out << "outer,residual_inf,inner_iterations\n";
  for (std::size_t t = 0; t < r.inner_iterations_per_step.size(); ++t) {
    out << t + 1 << ',';
    out << (t < r.outer_residual_history.size() ? csv_number(r.outer_residual_history[t]) : "nan");
    out << ',' << r.inner_iterations_per_step[t] << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& s) {
  out << "gamma_normalized,gamma,rho_loaded,status,outer_iterations,avg_inner_iterations,"
         "total_iterations\n";
  for (const auto& r : s.rows)
    out << csv_number(r.gamma_normalized) << ',' << csv_number(r.gamma) << ','
        << csv_number(r.rho_loaded) << ',' << to_string(r.status) << ',' << r.outer_iterations
        << ',' << csv_number(r.avg_inner_iterations) << ',' << r.total_iterations << '\n';
}

inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return csv_number(v);
}

inline Json json_vector(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline Json to_json(const GabpResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["final_max_change"] = json_number(r.residual_history.empty() ? 0.0 : r.residual_history.back());
  j["means"] = json_vector(r.means);
  j["variances"] = json_vector(r.variances);
  return j;
}

inline Json to_json(const FixedSolveReport& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["outer_iterations"] = r.outer_iterations;
  j["total_inner_iterations"] = r.total_inner_iterations();
  j["last_inner_status"] = to_string(r.last_inner_status);
  j["final_residual_inf"] =
      json_number(r.outer_residual_history.empty() ? std::nan("") : r.outer_residual_history.back());
  j["rho_loaded"] = json_number(r.rho_loaded);
  j["inner_iterations_per_step"] = r.inner_iterations_per_step;
  j["gamma_used"] = json_vector(r.gamma_used);
  j["solution"] = json_vector(r.solution);
  return j;
}

inline Json to_json(const CdmaConfig& c) {
  Json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["sigma2"] = c.sigma2;
  j["seed"] = c.seed;
  j["spreading"] = to_string(c.spreading);
  return j;
}

inline Json to_json(const SweepResult& s) {
  Json j;
  j["rho_original"] = json_number(s.rho_original);
  j["dd_level"] = json_number(s.dd_level);
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json row;
    row["gamma_normalized"] = r.gamma_normalized;
    row["gamma"] = json_number(r.gamma);
    row["rho_loaded"] = json_number(r.rho_loaded);
    row["status"] = to_string(r.status);
    row["outer_iterations"] = r.outer_iterations;
    row["avg_inner_iterations"] = json_number(r.avg_inner_iterations);
    row["total_iterations"] = r.total_iterations;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

/// Top-level report: mode, config, status, result body, trace path, timing.
struct RunReport {
  std::string mode;
  Json config = Json::object();
  std::string status;
  Json result = Json::object();
  std::string trace_path;
  double wall_seconds = 0.0;

  Json to_json() const {
    Json j;
    j["mode"] = mode;
    j["config"] = config;
    j["status"] = status;
    j["result"] = result;
    j["trace"] = trace_path.empty() ? Json(nullptr) : Json(trace_path);
    j["wall_seconds"] = wall_seconds;
    return j;
  }
};

}  // namespace gabpfix

#endif  // GABPFIX_REPORT_HPP
