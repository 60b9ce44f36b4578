#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ippmm/bench.hpp"
#include "ippmm/mps.hpp"
#include "ippmm/solver.hpp"
#include "ippmm/standardize.hpp"
#include "ippmm/theory.hpp"

namespace {

int exit_code(ippmm::SolveStatus s) {
  switch (s) {
    case ippmm::SolveStatus::Optimal: return 0;
    case ippmm::SolveStatus::Infeasible: return 2;
    case ippmm::SolveStatus::NoConvergence: return 3;
    case ippmm::SolveStatus::IllConditioned: return 4;
  }
  return 3;
}

double default_tol() {
  if (const char* env = std::getenv("IPPMM_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
    std::cerr << "warning: ignoring invalid IPPMM_TOL='" << env << "'\n";
  }
  return 1e-6;
}

void write_iteration_log(const std::string& path,
                         const std::vector<ippmm::IterLogEntry>& log) {
  std::ofstream f(path);
  f.precision(17);
  f << "k,mu,res_p,res_d,alpha_x,alpha_z,delta,rho,estimates_updated,"
       "escalated\n";
  for (const auto& e : log)
    f << e.k << ',' << e.mu << ',' << e.res_p << ',' << e.res_d << ','
      << e.alpha_x << ',' << e.alpha_z << ',' << e.delta << ',' << e.rho
      << ',' << (e.estimates_updated ? 1 : 0) << ',' << (e.escalated ? 1 : 0)
      << '\n';
}

int run_solve(const std::string& file, double tol, int maxit,
              const std::string& mode, const std::string& log_path,
              bool no_scaling, bool report) {
  ippmm::RawProblem raw = ippmm::parse_qps_file(file);
  auto [qp, map] = ippmm::to_standard_form(raw);
  ippmm::RowScaling sc;
  if (!no_scaling) sc = ippmm::scale_rows(qp.A, qp.b);
  for (const auto& w : qp.warnings) std::cerr << "warning: " << w << "\n";
  if (report) std::cout << ippmm::standardization_report(map);

  if (mode == "theory") {
    ippmm::TheoryParams params;
    params.tol = tol;
    ippmm::TheoryResult r = ippmm::theory_solve(qp, params);
    const char* name = r.status == ippmm::TheoryStatus::Optimal
                           ? "Optimal"
                           : r.status == ippmm::TheoryStatus::IterationLimit
                                 ? "IterationLimit"
                                 : "StepFailure";
    std::cout << "status: " << name << "\n"
              << "iterations: " << r.iterations << "\n"
              << "mu: " << r.mu << "\n"
              << "residuals: primal " << r.res_p << " dual " << r.res_d
              << "\n";
    if (!log_path.empty()) {
      std::ofstream f(log_path);
      f << ippmm::trace_to_csv(r.trace);
    }
    return r.status == ippmm::TheoryStatus::Optimal ? 0 : 3;
  }

  ippmm::SolverConfig cfg;
  cfg.tol = tol;
  cfg.ip_maxit = maxit;
  ippmm::SolveResult r = ippmm::solve(qp, cfg);
  ippmm::OriginalSolution sol = ippmm::map_back(r, map, sc);
  std::cout << "status: " << ippmm::to_string(r.status) << "\n";
  std::cout.precision(12);
  std::cout << "objective: " << sol.objective << "\n"
            << "iterations: " << r.iterations << "\n"
            << "residuals: primal " << r.res_primal << " dual " << r.res_dual
            << " mu " << r.mu << "\n";
  if (!log_path.empty()) write_iteration_log(log_path, r.log);
  return exit_code(r.status);
}

int run_bench(const std::string& dir, const std::string& config, double tol,
              const std::string& out_path) {
  std::vector<std::string> configs;
  if (config == "both") configs = {"ippmm", "noreg"};
  else configs = {config};
  ippmm::SolverConfig base;
  base.tol = tol;
  auto recs = ippmm::run_suite(dir, configs, base);
  std::ofstream f(out_path);
  if (!f) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return 1;
  }
  ippmm::write_records_csv(f, recs);
  int solved = 0;
  for (const auto& r : recs)
    if (r.solved()) ++solved;
  std::cout << recs.size() << " records (" << solved << " Optimal) -> "
            << out_path << "\n";
  return 0;
}

int run_profile(const std::string& records_path, const std::string& metric,
                const std::string& out_path) {
  std::ifstream in(records_path);
  if (!in) {
    std::cerr << "error: cannot read '" << records_path << "'\n";
    return 1;
  }
  auto recs = ippmm::read_records_csv(in);
  bool any_solved = false;
  for (const auto& r : recs) any_solved |= r.solved();
  if (!any_solved)
    std::cerr << "warning: no solved records; profile is empty\n";
  auto prof = ippmm::perf_profile(recs, metric == "iterations"
                                            ? ippmm::ProfileMetric::Iterations
                                            : ippmm::ProfileMetric::Time);
  if (out_path.empty()) {
    ippmm::write_profile_csv(std::cout, prof);
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 1;
    }
    ippmm::write_profile_csv(f, prof);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularized interior point solver for convex QPs"};
  app.require_subcommand(1);

  std::string file, dir, records_path;
  double tol = default_tol();
  int maxit = 200;
  std::string mode = "practical", log_path, config = "ippmm";
  std::string metric = "time", out_path;
  bool no_scaling = false, report = false;

  auto* s = app.add_subcommand("solve", "solve one QPS/MPS file");
  s->add_option("file", file)->required();
  s->add_option("--tol", tol, "convergence tolerance");
  s->add_option("--maxit", maxit, "iteration limit");
  s->add_option("--mode", mode)->check(CLI::IsMember({"practical", "theory"}));
  s->add_option("--log", log_path, "write per-iteration CSV");
  s->add_flag("--no-scaling", no_scaling, "skip row scaling");
  s->add_flag("--report", report, "print standardization report");

  auto* b = app.add_subcommand("bench", "solve every file in a directory");
  b->add_option("dir", dir)->required();
  b->add_option("--config", config)
      ->check(CLI::IsMember({"ippmm", "noreg", "both"}));
  b->add_option("--tol", tol);
  std::string bench_out = "records.csv";
  b->add_option("--out", bench_out, "records CSV path");

  auto* p = app.add_subcommand("profile", "performance profile from records");
  p->add_option("records", records_path)->required();
  p->add_option("--metric", metric)
      ->check(CLI::IsMember({"time", "iterations"}));
  p->add_option("--out", out_path, "profile CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed())
      return run_solve(file, tol, maxit, mode, log_path, no_scaling, report);
    if (b->parsed()) return run_bench(dir, config, tol, bench_out);
    if (p->parsed()) return run_profile(records_path, metric, out_path);
  } catch (const ippmm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const ippmm::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
