// gabpfix: command-line front end for the GaBP solvers and CDMA experiments.
//
//   gabpfix solve --matrix J.mtx --rhs h.txt --mode double --gamma-mode dd
//   gabpfix lsq   --matrix A.mtx --rhs b.txt --gamma-reg 0.1
//   gabpfix cdma  diverge|fixed|sweep --n 256 --k 64 --sigma2 1 --seed 7
//
// Exit status: 0 converged, 2 divergence / iteration cap, 1 usage or IO error.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gabpfix/gabpfix.hpp"
#include "gabpfix/report.hpp"

namespace {

using namespace gabpfix;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

struct SolveOptions {
  std::string mode = "double";
  std::string gamma_mode = "uniform";
  std::optional<double> gamma;
  std::string gamma_file;
  std::optional<double> margin;
  double step_size = 0.5;
  std::optional<double> inner_tol;
  double outer_tol = 1e-6;
  std::size_t max_inner = 10000;
  std::size_t max_outer = 10000;
  std::string out;
  std::string trace;
  bool detect = false;
};

void add_solver_flags(CLI::App* app, SolveOptions& o, bool with_mode) {
  if (with_mode)
    app->add_option("--mode", o.mode, "Solver: gabp, double or single")
        ->check(CLI::IsMember({"gabp", "double", "single"}))
        ->capture_default_str();
  app->add_option("--gamma-mode", o.gamma_mode, "Diagonal loading: uniform, dd or custom")
      ->check(CLI::IsMember({"uniform", "dd", "custom"}))
      ->capture_default_str();
  app->add_option("--gamma", o.gamma,
                  "uniform: normalized loading level (default rho(|R|)-1+margin); "
                  "custom: Gamma_ii for every node");
  app->add_option("--gamma-file", o.gamma_file, "custom: per-node Gamma_ii, one per line");
  app->add_option("--margin", o.margin, "Loading margin (uniform 0.05, dd 0.01)");
  app->add_option("--step-size", o.step_size, "Single-loop damping s in (0,1)")
      ->capture_default_str();
  app->add_option("--inner-tol", o.inner_tol,
                  "GaBP message tolerance (default min(1e-6, outer-tol/10); 1e-10 for --mode gabp)");
  app->add_option("--outer-tol", o.outer_tol, "Outer residual tolerance ||Jx-h||_inf")
      ->capture_default_str();
  app->add_option("--max-inner", o.max_inner, "GaBP sweep cap")->capture_default_str();
  app->add_option("--max-outer", o.max_outer, "Outer iteration cap")->capture_default_str();
  app->add_option("--out", o.out, "Write the JSON report here (default: stdout)");
  app->add_option("--trace", o.trace, "Write the CSV trace here");
  app->add_flag("--detect", o.detect, "Add sign(x) to the report");
}

LoadingRequest loading_request(const SolveOptions& o) {
  LoadingRequest r;
  r.margin = o.margin;
  if (o.gamma_mode == "dd") {
    r.mode = LoadingMode::DiagDominant;
  } else if (o.gamma_mode == "custom") {
    r.mode = LoadingMode::Custom;
    if (!o.gamma_file.empty())
      r.custom = load_vector(o.gamma_file);
    else if (o.gamma)
      r.custom = {*o.gamma};
    else
      throw InvalidArgument("--gamma-mode custom needs --gamma or --gamma-file");
  } else {
    r.mode = LoadingMode::Uniform;
    r.gamma = o.gamma;
  }
  return r;
}

OuterSettings outer_settings(const SolveOptions& o) {
  auto s = OuterSettings::with_outer_tol(o.outer_tol);
  if (o.inner_tol) s.inner.message_tol = *o.inner_tol;
  s.inner.max_iterations = o.max_inner;
  s.max_outer = o.max_outer;
  s.step_size = o.step_size;
  return s;
}

GabpSettings gabp_settings(const SolveOptions& o) {
  GabpSettings s;
  s.message_tol = o.inner_tol.value_or(1e-10);
  s.max_iterations = o.max_inner;
  return s;
}

Json solver_config(const SolveOptions& o) {
  Json j;
  j["mode"] = o.mode;
  j["gamma_mode"] = o.gamma_mode;
  j["gamma"] = o.gamma ? Json(*o.gamma) : Json(nullptr);
  j["margin"] = o.margin ? Json(*o.margin) : Json(nullptr);
  j["step_size"] = o.step_size;
  j["inner_tol"] = o.inner_tol ? Json(*o.inner_tol) : Json(nullptr);
  j["outer_tol"] = o.outer_tol;
  j["max_inner"] = o.max_inner;
  j["max_outer"] = o.max_outer;
  return j;
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  fn(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

void emit_report(const SolveOptions& o, RunReport& rep,
                 std::chrono::steady_clock::time_point start) {
  rep.trace_path = o.trace;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto text = rep.to_json().dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, [&](std::ostream& os) { os << text; });
    std::cout << rep.mode << ": " << rep.status << "\n";
  }
}

void add_detection(Json& result, std::span<const double> x) {
  Json d = Json::array();
  for (double v : x) d.push_back(v > 0 ? 1 : (v < 0 ? -1 : 0));
  result["detected"] = std::move(d);
}

int run_fixed(const SparseSymMatrix& J, const DenseVector& h, const SolveOptions& o,
              RunReport& rep) {
  const auto settings = outer_settings(o);
  const auto loading = resolve_loading(J, loading_request(o), settings.spectral);
  const auto r = o.mode == "single" ? single_loop_solve(J, h, loading, settings)
                                    : double_loop_solve(J, h, loading, settings);
  rep.status = std::string(to_string(r.status));
  rep.result = to_json(r);
  if (o.detect) add_detection(rep.result, r.solution);
  if (!o.trace.empty()) write_file(o.trace, [&](std::ostream& os) { write_outer_trace_csv(os, r); });
  return r.status == OuterStatus::Converged ? kExitOk : kExitNotConverged;
}

int cmd_solve(const std::string& matrix, const std::string& rhs, const SolveOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto J = load_symmetric_matrix(matrix);
  const auto h = load_vector(rhs);
  if (h.size() != J.size())
    throw Error("'" + rhs + "' has " + std::to_string(h.size()) + " entries, matrix is " +
                std::to_string(J.size()) + "x" + std::to_string(J.size()));
  RunReport rep;
  rep.mode = "solve";
  rep.config = solver_config(o);
  rep.config["matrix"] = matrix;
  rep.config["rhs"] = rhs;
  int code;
  if (o.mode == "gabp") {
    const auto r = run_gabp(J, h, gabp_settings(o));
    rep.status = std::string(to_string(r.status));
    rep.result = to_json(r);
    if (o.detect) add_detection(rep.result, r.means);
    if (!o.trace.empty())
      write_file(o.trace, [&](std::ostream& os) { write_gabp_trace_csv(os, r); });
    code = r.status == GabpStatus::Converged ? kExitOk : kExitNotConverged;
  } else {
    code = run_fixed(J, h, o, rep);
  }
  emit_report(o, rep, start);
  return code;
}

int cmd_lsq(const std::string& matrix, const std::string& rhs, double gamma_reg,
            const SolveOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto A = load_general_matrix(matrix);
  const auto b = load_vector(rhs);
  if (b.size() != A.rows())
    throw Error("'" + rhs + "' has " + std::to_string(b.size()) + " entries, matrix has " +
                std::to_string(A.rows()) + " rows");
  RunReport rep;
  rep.mode = "lsq";
  rep.config = solver_config(o);
  rep.config["matrix"] = matrix;
  rep.config["rhs"] = rhs;
  rep.config["gamma_reg"] = gamma_reg;
  const auto r = regularized_lsq_solve(A, b, gamma_reg, loading_request(o), outer_settings(o));
  rep.status = std::string(to_string(r.status));
  rep.result = to_json(r);
  if (!o.trace.empty()) write_file(o.trace, [&](std::ostream& os) { write_outer_trace_csv(os, r); });
  emit_report(o, rep, start);
  return r.status == OuterStatus::Converged ? kExitOk : kExitNotConverged;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> g;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    g.push_back(std::stod(item, &used));
    if (used != item.size()) throw InvalidArgument("bad grid value '" + item + "'");
  }
  return g;
}

int cmd_cdma(const std::string& which, const CdmaConfig& cfg, const SolveOptions& o,
             const std::string& grid, bool warm_sweep) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.mode = "cdma " + which;
  rep.config = solver_config(o);
  rep.config["cdma"] = to_json(cfg);
  int code = kExitOk;

  if (which == "diverge") {
    const auto run = experiment_divergence(cfg, gabp_settings(o));
    rep.status = std::string(to_string(run.result.status));
    rep.result["rho_abs_r"] = json_number(run.walk.rho);
    rep.result["walk_summable"] = run.walk.walk_summable;
    rep.result["gabp"] = to_json(run.result);
    if (!o.trace.empty())
      write_file(o.trace, [&](std::ostream& os) { write_mean_trace_csv(os, run.mean_trace); });
    code = run.result.status == GabpStatus::Converged ? kExitOk : kExitNotConverged;
  } else if (which == "fixed") {
    auto req = loading_request(o);
    const auto run = experiment_fixed(cfg, req, outer_settings(o), o.mode == "single");
    rep.status = std::string(to_string(run.report.status));
    rep.result["rho_original"] = json_number(run.rho_original);
    rep.result["loading_mode"] = to_string(run.loading.mode);
    rep.result["max_error_vs_dense"] = json_number(run.max_error_vs_dense);
    rep.result["verified"] = run.verified;
    rep.result["solve"] = to_json(run.report);
    if (o.detect) add_detection(rep.result, run.report.solution);
    if (!o.trace.empty())
      write_file(o.trace, [&](std::ostream& os) { write_outer_trace_csv(os, run.report); });
    code = run.verified ? kExitOk : kExitNotConverged;
  } else {
    SweepConfig sweep;
    if (!grid.empty()) sweep.gamma_grid = parse_grid(grid);
    sweep.inner_tol = o.inner_tol.value_or(1e-6);
    sweep.outer_tol = o.outer_tol;
    sweep.max_inner = o.max_inner;
    sweep.max_outer = o.max_outer;
    sweep.warm_start = warm_sweep;
    sweep.threads = threads_from_env();
    const auto res = experiment_sweep(cfg, sweep);
    std::size_t ok = 0;
    for (const auto& r : res.rows) ok += r.status == OuterStatus::Converged;
    rep.status = ok == res.rows.size() ? "Converged" : (ok ? "Partial" : "Failed");
    rep.result = to_json(res);
    write_sweep_csv(std::cerr, res);
    if (!o.trace.empty()) write_file(o.trace, [&](std::ostream& os) { write_sweep_csv(os, res); });
    code = ok ? kExitOk : kExitNotConverged;
  }
  emit_report(o, rep, start);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian belief propagation with diagonal-loading convergence fix"};
  app.require_subcommand(1);

  SolveOptions solve_opts;
  std::string matrix, rhs;
  auto* solve = app.add_subcommand("solve", "Solve J x = h for a symmetric Matrix Market J");
  solve->add_option("--matrix", matrix, "Symmetric .mtx file")->required();
  solve->add_option("--rhs", rhs, "Right-hand side, one value per line")->required();
  add_solver_flags(solve, solve_opts, true);

  SolveOptions lsq_opts;
  lsq_opts.mode = "double";
  double gamma_reg = 0.0;
  auto* lsq = app.add_subcommand("lsq", "Regularized least squares min ||A x - b||^2 + gamma ||x||^2");
  lsq->add_option("--matrix", matrix, "General (rectangular) .mtx file")->required();
  lsq->add_option("--rhs", rhs, "Observation vector, one value per line")->required();
  lsq->add_option("--gamma-reg", gamma_reg, "Ridge parameter gamma >= 0")->capture_default_str();
  add_solver_flags(lsq, lsq_opts, false);

  auto* cdma = app.add_subcommand("cdma", "Random-spreading CDMA MMSE experiments");
  cdma->require_subcommand(1);
  CdmaConfig cfg;
  std::string spreading = "binary";
  std::string grid;
  bool warm_sweep = false;
  SolveOptions cdma_opts;
  cdma_opts.gamma_mode = "dd";
  std::string which;
  for (const char* name : {"diverge", "fixed", "sweep"}) {
    auto* sub = cdma->add_subcommand(name);
    sub->add_option("--n", cfg.n, "Chips per symbol")->capture_default_str();
    sub->add_option("--k", cfg.k, "Users")->capture_default_str();
    sub->add_option("--sigma2", cfg.sigma2, "Noise variance")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    sub->add_option("--spreading", spreading, "binary (+-1) or binary-normalized (+-1/sqrt(n))")
        ->check(CLI::IsMember({"binary", "binary-normalized"}))
        ->capture_default_str();
    add_solver_flags(sub, cdma_opts, std::string(name) == "fixed");
    if (std::string(name) == "sweep")
    {
      sub->add_option("--grid", grid, "Comma-separated loading levels (1.0 = DD level)");
      sub->add_flag("--warm-start", warm_sweep, "Reuse messages between outer steps");
    }
    sub->callback([&which, name] { which = name; });
  }
  cdma->description("Subcommands: diverge (plain GaBP trace), fixed (loaded double loop), "
                    "sweep (loading tradeoff table)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(matrix, rhs, solve_opts);
    if (lsq->parsed()) return cmd_lsq(matrix, rhs, gamma_reg, lsq_opts);
    cfg.spreading = parse_spreading(spreading);
    return cmd_cdma(which, cfg, cdma_opts, grid, warm_sweep);
  } catch (const gabpfix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
