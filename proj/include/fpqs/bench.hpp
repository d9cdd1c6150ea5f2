#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fpqs/problems.hpp"
#include "fpqs/solver.hpp"

// Experiment harness. Runs the fixed point method and the projection-based
// baseline over a generated benchmark instance, several step-size rules and
// several initial points, and reports per-row averages of the iteration
// count, the best objective value V_func, and the fixed point residual
// V_dist at the best point.

namespace fpqs {

enum class Algorithm { fpqsm, qsm };

const char* algorithm_name(Algorithm a);

struct ExperimentSpec {
  enum class Case { unbounded, bounded, gcfs };

  Case benchmark_case = Case::bounded;
  int n = 10;
  int m = 10;
  std::vector<StepSchedule> steps;  // empty means the six standard rules
  double alpha = 0.5;
  int samples = 8;
  long max_iter = std::numeric_limits<long>::max();
  double seconds = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms = {Algorithm::fpqsm, Algorithm::qsm};

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

const char* case_name(ExperimentSpec::Case c);

// v in {1e-1, 1e-2, 1e-3}, constant and diminishing.
std::vector<StepSchedule> default_step_rules();

struct ResultRow {
  std::string algorithm;
  std::string step_label;
  double k_avg = 0.0;
  double v_func = 0.0;
  double v_dist = 0.0;
  int samples = 0;
  int aborted_samples = 0;
};

// Means of the objective values and of the fixed point residuals over the
// per-sample solutions.
std::pair<double, double> metrics(
    const std::vector<Point>& solutions,
    const std::function<double(const Point&)>& f, const Operator& T);

// One row per (algorithm, step rule), in declaration order. The same
// initial points (drawn from the initial-point stream of spec.seed) are fed
// to both algorithms. The baseline is skipped for the gcfs case, where no
// tractable metric projection onto the surrogate feasible set exists.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

enum class EmitFormat { csv, json };

std::string rows_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);
void emit(const std::vector<ResultRow>& rows, EmitFormat format,
          const std::string& path);

}  // namespace fpqs
