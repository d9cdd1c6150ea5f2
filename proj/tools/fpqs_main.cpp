// Command line front end: solve / bench / project.
//
// Exit codes: 0 success, 1 runtime abort, 2 usage or parse error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpqs/bench.hpp"
#include "fpqs/kernels.hpp"
#include "fpqs/point.hpp"
#include "fpqs/problems.hpp"
#include "fpqs/projection.hpp"
#include "fpqs/rng.hpp"
#include "fpqs/solver.hpp"

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

fpqs::Point parse_point(const std::string& s) {
  fpqs::Point p;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      p.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad coordinate list: '" + s + "'");
    }
  }
  if (p.empty()) throw std::invalid_argument("empty coordinate list");
  return p;
}

std::string point_preview(const fpqs::Point& p, std::size_t max_coords = 8) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < p.size() && i < max_coords; ++i) {
    if (i) out << ", ";
    out << p[i];
  }
  if (p.size() > max_coords) out << ", ... (" << p.size() << " coords)";
  out << ']';
  return out.str();
}

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> budget_iters;
  std::optional<double> budget_seconds;
  std::optional<double> alpha;
  std::vector<std::string> steps;
  std::string out_path;
  std::string format = "csv";
  std::vector<std::string> algorithms;
};

// ---------------------------------------------------------------- solve --

struct SolveConfig {
  std::string instance_path;
  std::string algorithm = "fpqsm";
  std::optional<std::string> x1_text;
  bool record_points = false;
  CommonOverrides common;
};

int cmd_solve(const SolveConfig& cfg) {
  using namespace fpqs;
  const json inst_json = load_json(cfg.instance_path);
  const std::string problem =
      inst_json.value("problem", std::string("cobb_douglas"));

  QuasiSubgradientOracle oracle;
  Operator T, P_D;
  ConvexRegion region;
  int dim = 0;
  Point x1;

  if (problem == "cobb_douglas") {
    const CobbDouglasInstance inst = CobbDouglasInstance::from_json(inst_json);
    dim = inst.n;
    oracle = cobb_douglas_oracle(inst);
    T = inst.case_label == "gcfs" ? build_gcfs_operator(inst)
                                  : build_constraint_operator(inst);
    P_D = projection_op(inst.domain_box());
    region = inst.feasible_region();
    if (!inst_json.contains("x1") && !cfg.x1_text) {
      rng::Stream init(cfg.common.seed.value_or(inst.seed),
                       rng::kInitialPointStream);
      const double hi = std::min(inst.box_bound, 100.0);
      x1.resize(static_cast<std::size_t>(dim));
      for (double& v : x1) v = init.uniform_in(0.0, hi);
    }
  } else {
    DiagnosticProblem diag_problem;
    if (problem == "norm") {
      diag_problem = diagnostic_norm_problem(inst_json.at("dim").get<int>());
    } else if (problem == "capped_norm") {
      // "alpha_cap" is the cap of min(||x||, cap); "alpha" stays the
      // relaxation parameter of the iteration
      diag_problem =
          diagnostic_capped_problem(inst_json.at("dim").get<int>(),
                                    inst_json.at("alpha_cap").get<double>());
    } else if (problem == "hinge_norm") {
      diag_problem = diagnostic_hinge_problem(
          inst_json.at("dim").get<int>(), inst_json.at("radius").get<double>());
    } else {
      throw std::invalid_argument("unknown problem kind '" + problem + "'");
    }
    dim = diag_problem.T.dim();
    oracle = std::move(diag_problem.oracle);
    T = std::move(diag_problem.T);
    P_D = std::move(diag_problem.P_D);
    // region stays empty: the whole space
  }

  if (cfg.x1_text) {
    x1 = parse_point(*cfg.x1_text);
  } else if (inst_json.contains("x1")) {
    x1 = inst_json.at("x1").get<Point>();
  }
  if (x1.empty())
    throw std::invalid_argument("no initial point: give \"x1\" in the "
                                "instance file or pass --x1");
  if (static_cast<int>(x1.size()) != dim)
    throw std::invalid_argument("initial point dimension mismatch");

  StepSchedule step = StepSchedule::constant(0.1);
  if (inst_json.contains("step"))
    step = StepSchedule::parse(inst_json.at("step").get<std::string>());
  if (!cfg.common.steps.empty())
    step = StepSchedule::parse(cfg.common.steps.back());
  const double alpha_value =
      cfg.common.alpha.value_or(inst_json.value("alpha", 0.5));
  const AlphaSchedule alphas = AlphaSchedule::constant(alpha_value);

  RunOptions opts;
  opts.max_iter = cfg.common.budget_iters.value_or(
      cfg.common.budget_seconds ? std::numeric_limits<long>::max() : 10000);
  if (cfg.common.budget_seconds) opts.time_budget_s = *cfg.common.budget_seconds;
  opts.record_points = cfg.record_points;

  RunRecord rec;
  if (cfg.algorithm == "fpqsm") {
    rec = fpqsm_run(oracle, T, P_D, step, alphas, x1, opts);
  } else if (cfg.algorithm == "qsm") {
    rec = qsm_run(oracle, region, step, x1, opts, &T);
  } else {
    throw std::invalid_argument("unknown algorithm '" + cfg.algorithm + "'");
  }

  EvalScratch scratch;
  std::cout << "problem: " << problem << " (dim " << dim << ")\n"
            << "algorithm: " << cfg.algorithm << "  step: " << step.label()
            << "  alpha: " << alpha_value << "\n"
            << "iterations: " << rec.iterations << "\n"
            << "stop reason: " << stop_reason_name(rec.stop_reason) << "\n"
            << "best value: " << rec.best_value << "\n"
            << "best point: " << point_preview(rec.best_point) << "\n"
            << "residual at best: "
            << fixed_point_residual(T, rec.best_point, scratch) << "\n"
            << "wall time: " << rec.wall_time << " s\n";
  if (rec.oscillation_detected)
    std::cout << "warning: the iterates cycle with period 2 (the trace does "
                 "not converge); a smaller or diminishing step size is "
                 "needed\n";
  if (rec.stop_reason == StopReason::aborted)
    std::cerr << "aborted: " << rec.abort_message << "\n";

  if (!cfg.common.out_path.empty()) {
    json out{{"config",
              {{"instance", cfg.instance_path},
               {"algorithm", cfg.algorithm},
               {"step", step.spec_string()},
               {"alpha", alpha_value},
               {"x1", x1}}},
             {"record", rec.to_json()}};
    std::ofstream f(cfg.common.out_path);
    if (!f)
      throw std::runtime_error("cannot open output file: " +
                               cfg.common.out_path);
    f << out.dump(2) << '\n';
  }

  return rec.stop_reason == StopReason::aborted ? 1 : 0;
}

// ---------------------------------------------------------------- bench --

struct BenchConfig {
  std::string spec_path;
  CommonOverrides common;
};

int cmd_bench(const BenchConfig& cfg) {
  using namespace fpqs;
  json spec_json = load_json(cfg.spec_path);
  if (cfg.common.seed) spec_json["seed"] = *cfg.common.seed;
  if (cfg.common.alpha) spec_json["alpha"] = *cfg.common.alpha;
  if (cfg.common.budget_iters || cfg.common.budget_seconds) {
    json budget = json::object();
    if (cfg.common.budget_iters) budget["max_iter"] = *cfg.common.budget_iters;
    if (cfg.common.budget_seconds)
      budget["seconds"] = *cfg.common.budget_seconds;
    spec_json["budget"] = budget;
  }
  if (!cfg.common.steps.empty()) spec_json["steps"] = cfg.common.steps;
  if (!cfg.common.algorithms.empty())
    spec_json["algorithms"] = cfg.common.algorithms;

  const ExperimentSpec spec = ExperimentSpec::from_json(spec_json);
  const std::vector<ResultRow> rows = run_experiment(spec);

  std::printf("%-8s %-12s %12s %16s %16s\n", "algo", "step", "k", "V_func",
              "V_dist");
  int aborted = 0;
  for (const auto& r : rows) {
    std::printf("%-8s %-12s %12.1f %16.8g %16.8g\n", r.algorithm.c_str(),
                r.step_label.c_str(), r.k_avg, r.v_func, r.v_dist);
    aborted += r.aborted_samples;
  }
  if (aborted > 0)
    std::fprintf(stderr, "%d sample run(s) aborted\n", aborted);

  if (!cfg.common.out_path.empty()) {
    const EmitFormat format =
        cfg.common.format == "json" ? EmitFormat::json : EmitFormat::csv;
    emit(rows, format, cfg.common.out_path);
    std::cout << "wrote " << cfg.common.out_path << "\n";
  }
  return aborted > 0 ? 1 : 0;
}

// -------------------------------------------------------------- project --

struct ProjectConfig {
  std::string region_path;
  std::string point_text;
  double tol = 1e-8;
  int max_sweeps = 100000;
};

int cmd_project(const ProjectConfig& cfg) {
  using namespace fpqs;
  const ConvexRegion region =
      ConvexRegion::from_json(load_json(cfg.region_path));
  const Point z = parse_point(cfg.point_text);

  const ProjectionReport rep =
      dykstra_project(region, z, cfg.tol, cfg.max_sweeps);
  std::cout << "point: " << point_preview(rep.point) << "\n"
            << "sweeps: " << rep.iterations << "\n"
            << "max violation: " << rep.max_violation << "\n"
            << "achieved tol: " << rep.achieved_tol << "\n"
            << "converged: " << (rep.converged ? "yes" : "no") << "\n"
            << "infeasible suspected: "
            << (rep.infeasible_suspected ? "yes" : "no") << "\n";
  return 0;
}

int run_main(int argc, char** argv) {
  CLI::App app{"quasiconvex subgradient optimization over fixed point sets"};
  app.require_subcommand(1);

  SolveConfig solve_cfg;
  BenchConfig bench_cfg;
  ProjectConfig project_cfg;

  auto add_common = [](CLI::App* sub, CommonOverrides& c) {
    sub->add_option("--seed", c.seed, "RNG seed override");
    sub->add_option("--budget-iters", c.budget_iters, "iteration budget");
    sub->add_option("--budget-seconds", c.budget_seconds,
                    "wall clock budget in seconds");
    sub->add_option("--alpha", c.alpha, "constant alpha in (0,1)");
    sub->add_option("--step", c.steps,
                    "step rule: constant:<v> or diminishing:<c>");
    sub->add_option("--out", c.out_path, "output file path");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one optimization");
  solve->add_option("instance", solve_cfg.instance_path, "instance JSON file")
      ->required();
  solve->add_option("--algorithm", solve_cfg.algorithm, "fpqsm or qsm");
  solve->add_option("--x1", solve_cfg.x1_text,
                    "initial point as comma-separated coordinates");
  solve->add_flag("--record-points", solve_cfg.record_points,
                  "keep the iterate trace in the output record");
  add_common(solve, solve_cfg.common);

  CLI::App* bench = app.add_subcommand("bench", "run a benchmark experiment");
  bench->add_option("spec", bench_cfg.spec_path, "experiment spec JSON file")
      ->required();
  add_common(bench, bench_cfg.common);
  bench->add_option("--format", bench_cfg.common.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--algorithms", bench_cfg.common.algorithms,
                    "subset of {fpqsm, qsm}")
      ->delimiter(',');

  CLI::App* project =
      app.add_subcommand("project", "project a point onto a convex region");
  project->add_option("region", project_cfg.region_path, "region JSON file")
      ->required();
  project->add_option("--point", project_cfg.point_text,
                      "comma-separated coordinates")
      ->required();
  project->add_option("--tol", project_cfg.tol, "projection tolerance");
  project->add_option("--max-sweeps", project_cfg.max_sweeps,
                      "Dykstra sweep limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(solve_cfg);
    if (app.got_subcommand(bench)) return cmd_bench(bench_cfg);
    if (app.got_subcommand(project)) return cmd_project(project_cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  } catch (...) {
    std::fprintf(stderr, "fatal: unknown error\n");
    return 1;
  }
}
