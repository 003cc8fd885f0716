#include "gnep/bench.hpp"
#include "gnep/diagnostics.hpp"
#include "gnep/problems.hpp"
#include "gnep/report_io.hpp"
#include "gnep/slcp.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitInput = 3;

// "0.5" -> constant vector of length n, "1,2,3" -> that vector.
gnep::Vec parse_vector_arg(const std::string& s, gnep::Index n, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size())
      throw gnep::ContractViolation(what + ": not a number: '" + item + "'");
    vals.push_back(v);
  }
  if (vals.size() == 1) return gnep::Vec::Constant(n, vals[0]);
  if (static_cast<gnep::Index>(vals.size()) != n)
    throw gnep::ContractViolation(what + " needs 1 or " + std::to_string(n) + " entries");
  return Eigen::Map<gnep::Vec>(vals.data(), n);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    gnep::write_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Nash equilibrium solver (sequential LCP method)"};
  app.require_subcommand(1);

  std::string problem_id, x0_arg, lambda0_arg = "0", solver = "slcp", trace_path;
  double rho = 10.0, eta = 0.1, tol = 1e-7;
  int max_iter = 200;
  auto* solve = app.add_subcommand("solve", "Solve one problem");
  solve->add_option("problem", problem_id, "Built-in id or AGNEP JSON file")->required();
  solve->add_option("--x0", x0_arg, "Start: scalar or comma-separated vector");
  solve->add_option("--lambda0", lambda0_arg, "Initial multipliers: scalar or vector");
  solve->add_option("--solver", solver, "slcp or smm")->check(CLI::IsMember({"slcp", "smm"}));
  solve->add_option("--rho", rho, "Merit penalty");
  solve->add_option("--eta", eta, "Sufficient decrease parameter");
  solve->add_option("--tol", tol, "KKT residual tolerance");
  solve->add_option("--max-iter", max_iter, "Outer iteration limit");
  solve->add_option("--trace", trace_path, "Write the iteration trace as JSON");

  std::string config_path, bench_out;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("--config", config_path, "Suite JSON")->required();
  bench->add_option("--out", bench_out, "Results CSV (stdout if omitted)");

  std::string records_path, metric = "time", profile_out;
  auto* profile = app.add_subcommand("profile", "Performance profile from results");
  profile->add_option("results", records_path, "Results CSV")->required();
  profile->add_option("--metric", metric, "time, grad or hess")
      ->check(CLI::IsMember({"time", "grad", "hess"}));
  profile->add_option("--out", profile_out, "Profile CSV (stdout if omitted)");

  std::string diag_problem, at = "builtin-solution", diag_out;
  double act_tol = -1.0;
  auto* diag = app.add_subcommand("diagnose", "Regularity diagnostics at a point");
  diag->add_option("problem", diag_problem, "Built-in id or AGNEP JSON file")->required();
  diag->add_option("--at", at, "Point JSON file or builtin-solution");
  diag->add_option("--act-tol", act_tol, "Activity tolerance");
  diag->add_option("--out", diag_out, "Report JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*solve) {
      const gnep::ProblemInstance inst = gnep::resolve_problem(problem_id);
      const gnep::GnepProblem& p = *inst.problem;
      gnep::Vec x0 = x0_arg.empty()
                         ? inst.default_start.value_or(gnep::Vec::Ones(p.num_vars()))
                         : parse_vector_arg(x0_arg, p.num_vars(), "--x0");
      gnep::Vec l0 = parse_vector_arg(lambda0_arg, p.num_constraints(), "--lambda0");
      gnep::SolveResult res;
      if (solver == "slcp") {
        gnep::SlcpOptions o;
        o.rho = rho;
        o.eta = eta;
        o.tol = tol;
        o.max_outer_iters = max_iter;
        res = gnep::slcp_solve(p, x0, l0, o);
      } else {
        gnep::SmmOptions o;
        o.tol = tol;
        o.max_iters = max_iter;
        res = gnep::solve_smm_baseline(p, x0, l0, o);
      }
      if (!trace_path.empty()) gnep::write_file(trace_path, gnep::trace_to_json(res, problem_id));
      std::printf("problem   %s\nsolver    %s\nstatus    %s\niters     %d\nresidual  %.3e\n"
                  "grad      %ld\nhess      %ld\ntime_ms   %.3f\n",
                  problem_id.c_str(), solver.c_str(), gnep::to_string(res.trace.status),
                  res.trace.iterations(), res.trace.final_residual(),
                  res.trace.counters.grad_evals, res.trace.counters.hess_evals,
                  res.trace.elapsed_ms);
      std::printf("x        ");
      for (gnep::Index i = 0; i < res.point.x.size(); ++i) std::printf(" %.10g", res.point.x[i]);
      std::printf("\n");
      if (!res.trace.message.empty()) std::printf("message   %s\n", res.trace.message.c_str());
      return res.converged() ? kExitOk : kExitNoConvergence;
    }
    if (*bench) {
      const gnep::SuiteConfig cfg = gnep::parse_suite_config(gnep::read_file(config_path));
      const auto records = gnep::run_suite(cfg);
      emit(bench_out, gnep::records_to_csv(records));
      for (const auto& r : records)
        if (!r.converged()) return kExitNoConvergence;
      return kExitOk;
    }
    if (*profile) {
      const auto records = gnep::records_from_csv(gnep::read_file(records_path));
      const auto curve = gnep::performance_profile(records, gnep::parse_metric(metric));
      emit(profile_out, gnep::profile_to_csv(curve));
      for (const auto& p : curve.excluded)
        std::fprintf(stderr, "excluded (all solvers failed): %s\n", p.c_str());
      return kExitOk;
    }
    if (*diag) {
      const gnep::ProblemInstance inst = gnep::resolve_problem(diag_problem);
      gnep::JointPoint pt;
      gnep::DiagnosticsOptions opts;
      if (at == "builtin-solution") {
        if (!inst.reference_solution)
          throw gnep::ContractViolation("problem has no built-in solution: " + diag_problem);
        pt = *inst.reference_solution;
        opts.act_tol = 1e-10;
      } else {
        pt = gnep::parse_point_json(gnep::read_file(at));
      }
      if (act_tol >= 0) opts.act_tol = act_tol;
      const auto rep = gnep::diagnose(*inst.problem, pt, opts);
      emit(diag_out, gnep::diagnostics_to_json(rep, diag_problem) + "\n");
      return kExitOk;
    }
  } catch (const gnep::ContractViolation& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const gnep::SchemaError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const gnep::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
