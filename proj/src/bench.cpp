#include "fpqs/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fpqs/rng.hpp"

namespace fpqs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  return a == Algorithm::fpqsm ? "fpqsm" : "qsm";
}

const char* case_name(ExperimentSpec::Case c) {
  switch (c) {
    case ExperimentSpec::Case::unbounded: return "unbounded";
    case ExperimentSpec::Case::bounded: return "bounded";
    case ExperimentSpec::Case::gcfs: return "gcfs";
  }
  return "?";
}

std::vector<StepSchedule> default_step_rules() {
  return {StepSchedule::constant(1e-1),    StepSchedule::constant(1e-2),
          StepSchedule::constant(1e-3),    StepSchedule::diminishing(1e-1),
          StepSchedule::diminishing(1e-2), StepSchedule::diminishing(1e-3)};
}

void ExperimentSpec::validate() const {
  require(n >= 1 && m >= 1, "experiment: n and m must be >= 1");
  require(samples >= 1, "experiment: samples must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "experiment: alpha outside (0,1)");
  require(max_iter != std::numeric_limits<long>::max() ||
              std::isfinite(seconds),
          "experiment: need an iteration or time budget");
  require(!algorithms.empty(), "experiment: no algorithms selected");
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : (steps.empty() ? default_step_rules() : steps))
    steps_json.push_back(s.spec_string());
  nlohmann::json algos = nlohmann::json::array();
  for (auto a : algorithms) algos.push_back(algorithm_name(a));
  nlohmann::json budget = nlohmann::json::object();
  if (max_iter != std::numeric_limits<long>::max())
    budget["max_iter"] = max_iter;
  if (std::isfinite(seconds)) budget["seconds"] = seconds;
  return {{"case", case_name(benchmark_case)},
          {"n", n},
          {"m", m},
          {"steps", steps_json},
          {"alpha", alpha},
          {"samples", samples},
          {"budget", budget},
          {"seed", seed},
          {"algorithms", algos}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  const std::string label = j.at("case").get<std::string>();
  if (label == "unbounded") {
    spec.benchmark_case = Case::unbounded;
  } else if (label == "bounded") {
    spec.benchmark_case = Case::bounded;
  } else if (label == "gcfs") {
    spec.benchmark_case = Case::gcfs;
  } else {
    throw std::invalid_argument("experiment json: unknown case '" + label +
                                "'");
  }
  spec.n = j.at("n").get<int>();
  spec.m = j.at("m").get<int>();
  spec.steps.clear();
  if (j.contains("steps"))
    for (const auto& s : j.at("steps"))
      spec.steps.push_back(StepSchedule::parse(s.get<std::string>()));
  spec.alpha = j.value("alpha", 0.5);
  spec.samples = j.value("samples", 8);
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    if (b.contains("max_iter")) spec.max_iter = b.at("max_iter").get<long>();
    if (b.contains("seconds")) spec.seconds = b.at("seconds").get<double>();
  }
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("algorithms")) {
    spec.algorithms.clear();
    for (const auto& a : j.at("algorithms")) {
      const std::string name = a.get<std::string>();
      if (name == "fpqsm") {
        spec.algorithms.push_back(Algorithm::fpqsm);
      } else if (name == "qsm") {
        spec.algorithms.push_back(Algorithm::qsm);
      } else {
        throw std::invalid_argument("experiment json: unknown algorithm '" +
                                    name + "'");
      }
    }
  }
  spec.validate();
  return spec;
}

std::pair<double, double> metrics(
    const std::vector<Point>& solutions,
    const std::function<double(const Point&)>& f, const Operator& T) {
  require(!solutions.empty(), "metrics: empty solution list");
  EvalScratch scratch;
  double func_sum = 0.0, dist_sum = 0.0;
  for (const auto& x : solutions) {
    func_sum += f(x);
    dist_sum += fixed_point_residual(T, x, scratch);
  }
  const double inv = 1.0 / static_cast<double>(solutions.size());
  return {func_sum * inv, dist_sum * inv};
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  CobbDouglasInstance inst;
  switch (spec.benchmark_case) {
    case ExperimentSpec::Case::unbounded:
      inst = gen_unbounded_case(spec.n, spec.m, spec.seed);
      break;
    case ExperimentSpec::Case::bounded:
      inst = gen_bounded_case(spec.n, spec.m, spec.seed);
      break;
    case ExperimentSpec::Case::gcfs:
      inst = gen_gcfs_case(spec.n, spec.m, spec.seed);
      break;
  }

  const bool gcfs = spec.benchmark_case == ExperimentSpec::Case::gcfs;
  const Operator T =
      gcfs ? build_gcfs_operator(inst) : build_constraint_operator(inst);
  const Operator P_D = projection_op(inst.domain_box());
  const QuasiSubgradientOracle oracle = cobb_douglas_oracle(inst);
  const ConvexRegion region = inst.feasible_region();
  auto value_fn = [&oracle](const Point& x) { return oracle.value(x); };

  // Initial points are shared across algorithms and step rules so the
  // comparisons are paired.
  rng::Stream init_stream(spec.seed, rng::kInitialPointStream);
  const double hi = std::min(inst.box_bound, 100.0);
  std::vector<Point> initial_points(static_cast<std::size_t>(spec.samples));
  for (auto& x1 : initial_points) {
    x1.resize(static_cast<std::size_t>(spec.n));
    for (double& v : x1) v = init_stream.uniform_in(0.0, hi);
  }

  const std::vector<StepSchedule> steps =
      spec.steps.empty() ? default_step_rules() : spec.steps;
  const AlphaSchedule alphas = AlphaSchedule::constant(spec.alpha);

  RunOptions opts;
  opts.max_iter = spec.max_iter;
  opts.time_budget_s = spec.seconds;

  std::vector<ResultRow> rows;
  for (Algorithm algo : spec.algorithms) {
    if (gcfs && algo == Algorithm::qsm) continue;
    for (const auto& step : steps) {
      ResultRow row;
      row.algorithm = algorithm_name(algo);
      row.step_label = step.label();
      row.samples = spec.samples;

      std::vector<Point> solutions;
      double iter_sum = 0.0;
      int counted = 0;
      for (const auto& x1 : initial_points) {
        RunRecord rec =
            algo == Algorithm::fpqsm
                ? fpqsm_run(oracle, T, P_D, step, alphas, x1, opts)
                : qsm_run(oracle, region, step, x1, opts, &T);
        if (rec.stop_reason == StopReason::aborted) {
          ++row.aborted_samples;
          continue;
        }
        solutions.push_back(std::move(rec.best_point));
        iter_sum += static_cast<double>(rec.iterations);
        ++counted;
      }
      if (counted > 0) {
        row.k_avg = iter_sum / counted;
        std::tie(row.v_func, row.v_dist) = metrics(solutions, value_fn, T);
      } else {
        row.k_avg = row.v_func = row.v_dist =
            std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "algorithm,step,k,V_func,V_dist\n";
  for (const auto& r : rows) {
    out += r.algorithm;
    out += ',';
    out += r.step_label;
    out += ',';
    out += full_precision(r.k_avg);
    out += ',';
    out += full_precision(r.v_func);
    out += ',';
    out += full_precision(r.v_dist);
    out += '\n';
  }
  return out;
}

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"algorithm", r.algorithm},
                   {"step", r.step_label},
                   {"k", r.k_avg},
                   {"V_func", r.v_func},
                   {"V_dist", r.v_dist},
                   {"samples", r.samples},
                   {"aborted_samples", r.aborted_samples}});
  return arr;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  std::vector<ResultRow> rows;
  for (const auto& rj : j) {
    ResultRow r;
    r.algorithm = rj.at("algorithm").get<std::string>();
    r.step_label = rj.at("step").get<std::string>();
    r.k_avg = rj.at("k").get<double>();
    r.v_func = rj.at("V_func").get<double>();
    r.v_dist = rj.at("V_dist").get<double>();
    r.samples = rj.value("samples", 0);
    r.aborted_samples = rj.value("aborted_samples", 0);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit(const std::vector<ResultRow>& rows, EmitFormat format,
          const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open output file: " + path);
  if (format == EmitFormat::csv) {
    out << rows_to_csv(rows);
  } else {
    out << rows_to_json(rows).dump(2) << '\n';
  }
  if (!out)
    throw std::runtime_error("failed while writing: " + path);
}

}  // namespace fpqs
