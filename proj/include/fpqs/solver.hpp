#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpqs/operators.hpp"
#include "fpqs/point.hpp"
#include "fpqs/projection.hpp"
#include "fpqs/subgradients.hpp"

// Subgradient methods for quasiconvex objectives.
//
// The fixed point method iterates
//
//   x_{k+1} = P_D( alpha_k * x_k + (1 - alpha_k) * T(x_k - v_k * g_k) )
//
// where g_k is a unit quasi-subgradient at x_k, T is a firmly nonexpansive
// mapping whose fixed point set is the constraint set, and P_D projects
// onto a simple bounding set D. The inner mapping is a Krasnosel'skii-Mann
// step toward Fix(T) wrapped around a subgradient step, so the method needs
// only evaluations of T, never a projection onto the constraint set.
//
// The baseline method (qsm_run) iterates x_{k+1} = P_{X cap D}(x_k - v_k g_k)
// with the metric projection computed inexactly by Dykstra's algorithm to
// squared-distance tolerance v_k / 10.

namespace fpqs {

struct StepSchedule {
  enum class Kind { constant, diminishing };
  Kind kind = Kind::constant;
  double value = 0.1;  // v for constant, c for diminishing (v_k = c/k)

  double at(long k) const {
    return kind == Kind::constant ? value : value / static_cast<double>(k);
  }

  static StepSchedule constant(double v);
  static StepSchedule diminishing(double c);
  static StepSchedule parse(const std::string& s);  // "constant:<v>" etc.
  std::string label() const;                        // "v=0.1", "v=0.1/k"
  std::string spec_string() const;                  // "constant:0.1"
};

class AlphaSchedule {
 public:
  static AlphaSchedule constant(double a);  // a in (0, 1)
  static AlphaSchedule generator(std::function<double(long)> fn);

  double at(long k) const;
  bool is_constant() const { return !fn_; }
  double constant_value() const { return const_; }

 private:
  double const_ = 0.5;
  std::function<double(long)> fn_;
};

enum class StopReason { max_iter, budget, at_minimum, aborted };

const char* stop_reason_name(StopReason r);

struct RunOptions {
  long max_iter = std::numeric_limits<long>::max();
  double time_budget_s = std::numeric_limits<double>::infinity();
  bool record_points = false;  // keep the full iterate trace
  long trace_stride = 1;       // store every j-th iterate in the traces
  int qsm_max_sweeps = 100000;
};

struct RunRecord {
  long iterations = 0;
  double best_value = std::numeric_limits<double>::infinity();
  Point best_point;
  Point final_point;
  std::vector<double> residual_trace;  // ||x_k - T(x_k)||
  std::vector<double> value_trace;     // f(x_k)
  std::vector<Point> point_trace;      // x_k, when record_points
  double wall_time = 0.0;
  double inner_solver_time = 0.0;  // time spent inside dykstra_project
  StopReason stop_reason = StopReason::max_iter;
  std::string abort_message;
  long trace_stride = 1;
  bool oscillation_detected = false;  // period-2 iterate cycle seen

  nlohmann::json to_json() const;
};

// One step of the fixed point method. Requires ||g|| = 1 within 1e-12 and
// alpha in (0, 1].
Point fpqsm_step(const Point& x, const Point& g, double v, double alpha,
                 const Operator& T, const Operator& P_D);

RunRecord fpqsm_run(const QuasiSubgradientOracle& oracle, const Operator& T,
                    const Operator& P_D, const StepSchedule& steps,
                    const AlphaSchedule& alphas, const Point& x1,
                    const RunOptions& opts);

// residual_op, when given, is used for the residual trace (paired
// comparisons use the same T as the fixed point method); otherwise the
// region's max violation is recorded.
RunRecord qsm_run(const QuasiSubgradientOracle& oracle,
                  const ConvexRegion& region, const StepSchedule& steps,
                  const Point& x1, const RunOptions& opts,
                  const Operator* residual_op = nullptr);

// Known solution data for diagnostic problems: f attains f_star at x_star
// and satisfies |f(z) - f(x_star)| <= L * ||z - x_star||^beta.
struct DiagnosticOracle {
  double f_star = 0.0;
  Point x_star;
  double L = 1.0;
  double beta = 1.0;
};

// Per-iteration check of the descent inequality
//   ||x_{k+1}-x*||^2 <= ||x_k-x*||^2
//                       - 2 v_k (1-alpha_k) ((f(x_k)-f*)/L)^(1/beta)
//                       + (1-alpha_k) v_k^2
// over a run recorded with points at stride 1. Iterations with
// f(x_k) <= f_star are skipped.
std::vector<bool> lemma1_check(const RunRecord& record,
                               const DiagnosticOracle& diag,
                               const StepSchedule& steps,
                               const AlphaSchedule& alphas,
                               double slack = 1e-10);

// Best-value rate bound for the diminishing rule v_k = c/k with constant
// alpha: f(x*_k) - f* <= L * ((||x1-x*||^2 + 2c^2(1-alpha)) /
// (2c(1-alpha) log(k+1)))^beta for every recorded k >= 1.
bool rate_bound_check(const RunRecord& record, const DiagnosticOracle& diag,
                      double c, double alpha, double slack = 1e-8);

}  // namespace fpqs
