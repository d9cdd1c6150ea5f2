#include "fpqs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace fpqs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

StepSchedule StepSchedule::constant(double v) {
  require(v > 0.0, "step schedule: constant v must be positive");
  return {Kind::constant, v};
}

StepSchedule StepSchedule::diminishing(double c) {
  require(c > 0.0, "step schedule: diminishing c must be positive");
  return {Kind::diminishing, c};
}

StepSchedule StepSchedule::parse(const std::string& s) {
  const auto colon = s.find(':');
  require(colon != std::string::npos,
          "step schedule: expected 'constant:<v>' or 'diminishing:<c>', got '" +
              s + "'");
  const std::string kind = s.substr(0, colon);
  double value = 0.0;
  try {
    value = std::stod(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("step schedule: bad numeric value in '" + s +
                                "'");
  }
  if (kind == "constant") return constant(value);
  if (kind == "diminishing") return diminishing(value);
  throw std::invalid_argument("step schedule: unknown kind '" + kind + "'");
}

std::string StepSchedule::label() const {
  return kind == Kind::constant ? "v=" + format_value(value)
                                : "v=" + format_value(value) + "/k";
}

std::string StepSchedule::spec_string() const {
  return (kind == Kind::constant ? "constant:" : "diminishing:") +
         format_value(value);
}

AlphaSchedule AlphaSchedule::constant(double a) {
  require(a > 0.0 && a < 1.0, "alpha schedule: constant alpha outside (0,1)");
  AlphaSchedule s;
  s.const_ = a;
  return s;
}

AlphaSchedule AlphaSchedule::generator(std::function<double(long)> fn) {
  require(static_cast<bool>(fn), "alpha schedule: null generator");
  AlphaSchedule s;
  s.fn_ = std::move(fn);
  return s;
}

double AlphaSchedule::at(long k) const {
  const double a = fn_ ? fn_(k) : const_;
  require(a > 0.0 && a <= 1.0, "alpha schedule: value outside (0,1]");
  return a;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::max_iter: return "max_iter";
    case StopReason::budget: return "budget";
    case StopReason::at_minimum: return "at_minimum";
    case StopReason::aborted: return "aborted";
  }
  return "?";
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j{{"iterations", iterations},
                   {"best_value", best_value},
                   {"best_point", best_point},
                   {"final_point", final_point},
                   {"value_trace", value_trace},
                   {"residual_trace", residual_trace},
                   {"wall_time", wall_time},
                   {"inner_solver_time", inner_solver_time},
                   {"stop_reason", stop_reason_name(stop_reason)},
                   {"trace_stride", trace_stride},
                   {"oscillation_detected", oscillation_detected}};
  if (!abort_message.empty()) j["abort_message"] = abort_message;
  return j;
}

Point fpqsm_step(const Point& x, const Point& g, double v, double alpha,
                 const Operator& T, const Operator& P_D) {
  require(x.size() == g.size(), "fpqsm_step: dimension mismatch");
  require(static_cast<int>(x.size()) == T.dim() &&
              static_cast<int>(x.size()) == P_D.dim(),
          "fpqsm_step: operator dimension mismatch");
  require(std::abs(norm(g) - 1.0) <= 1e-12, "fpqsm_step: g must be a unit vector");
  require(alpha > 0.0 && alpha <= 1.0, "fpqsm_step: alpha outside (0,1]");
  require(v >= 0.0, "fpqsm_step: negative step size");

  const std::size_t n = x.size();
  EvalScratch scratch;
  Point inner(n), mapped(n), out(n);
  kern::axpby(1.0, x.data(), -v, g.data(), inner.data(), n);
  T.eval(inner.data(), mapped.data(), scratch);
  kern::axpby(alpha, x.data(), 1.0 - alpha, mapped.data(), inner.data(), n);
  P_D.eval(inner.data(), out.data(), scratch);
  return out;
}

namespace {

// Shared driver for both methods. step_fn maps (k, x, g) to the next
// iterate and returns false to abort; residual_fn measures constraint
// violation at x.
template <typename StepFn, typename ResidualFn>
RunRecord run_loop(const QuasiSubgradientOracle& oracle, const Point& x_start,
                   const RunOptions& opts, StepFn&& step_fn,
                   ResidualFn&& residual_fn, RunRecord record) {
  const auto t0 = Clock::now();
  const bool timed = std::isfinite(opts.time_budget_s);
  require(opts.trace_stride >= 1, "run: trace stride must be >= 1");

  Point x = x_start;
  record.trace_stride = opts.trace_stride;
  record.best_value = oracle.value(x);
  record.best_point = x;
  record.stop_reason = StopReason::max_iter;

  Point x_next, prev_prev;
  int osc_run = 0;

  while (true) {
    if (record.iterations >= opts.max_iter) {
      record.stop_reason = StopReason::max_iter;
      break;
    }
    if (timed && seconds_since(t0) >= opts.time_budget_s) {
      record.stop_reason = StopReason::budget;
      break;
    }

    const long k = record.iterations + 1;
    const double fx = oracle.value(x);
    if (!std::isfinite(fx)) {
      record.stop_reason = StopReason::aborted;
      record.abort_message =
          "non-finite objective value at iteration " + std::to_string(k);
      break;
    }
    SubgradResult sg = oracle.unit_subgrad(x);

    auto record_iterate = [&] {
      record.iterations = k;
      if ((k - 1) % opts.trace_stride == 0) {
        record.value_trace.push_back(fx);
        record.residual_trace.push_back(residual_fn(x));
        if (opts.record_points) record.point_trace.push_back(x);
      }
      if (fx < record.best_value) {
        record.best_value = fx;
        record.best_point = x;
      }
    };

    if (sg.at_minimum) {
      record_iterate();
      record.stop_reason = StopReason::at_minimum;
      break;
    }

    if (!step_fn(k, x, sg.g, x_next)) {
      record.stop_reason = StopReason::aborted;
      break;
    }
    if (!all_finite(x_next)) {
      record.stop_reason = StopReason::aborted;
      record.abort_message =
          "non-finite iterate at iteration " + std::to_string(k);
      break;
    }
    // An iteration finishing past the deadline does not count.
    if (timed && seconds_since(t0) > opts.time_budget_s) {
      record.stop_reason = StopReason::budget;
      break;
    }

    record_iterate();

    // Period-2 cycle watch: x_{k+1} returns to x_{k-1} while moving away
    // from x_k. One hundred consecutive hits flags the run.
    if (k >= 2) {
      const double scale = 1.0 + norm(x_next);
      if (dist(x_next, prev_prev) <= 1e-12 * scale &&
          dist(x_next, x) > 1e-9 * scale) {
        if (++osc_run >= 100) record.oscillation_detected = true;
      } else {
        osc_run = 0;
      }
    }
    prev_prev = std::move(x);
    x = std::move(x_next);
    x_next.clear();
  }

  record.final_point = std::move(x);
  record.wall_time = seconds_since(t0);
  return record;
}

}  // namespace

RunRecord fpqsm_run(const QuasiSubgradientOracle& oracle, const Operator& T,
                    const Operator& P_D, const StepSchedule& steps,
                    const AlphaSchedule& alphas, const Point& x1,
                    const RunOptions& opts) {
  require(T.dim() == P_D.dim(), "fpqsm_run: operator dimension mismatch");
  require(static_cast<int>(x1.size()) == T.dim(),
          "fpqsm_run: initial point dimension mismatch");
  require(T.tag() == OpTag::firmly_nonexpansive,
          "fpqsm_run: T must be tagged firmly nonexpansive (wrap it with "
          "firm_up)");
  require(all_finite(x1), "fpqsm_run: non-finite initial point");

  const std::size_t n = x1.size();
  EvalScratch scratch;
  Point x_start = P_D(x1);  // the iterates live in D

  Point inner(n), mapped(n);
  auto step_fn = [&](long k, const Point& x, const Point& g, Point& out) {
    const double v = steps.at(k);
    const double alpha = alphas.at(k);
    kern::axpby(1.0, x.data(), -v, g.data(), inner.data(), n);
    T.eval(inner.data(), mapped.data(), scratch);
    kern::axpby(alpha, x.data(), 1.0 - alpha, mapped.data(), inner.data(), n);
    out.resize(n);
    P_D.eval(inner.data(), out.data(), scratch);
    return true;
  };
  auto residual_fn = [&](const Point& x) {
    return fixed_point_residual(T, x, scratch);
  };

  return run_loop(oracle, x_start, opts, step_fn, residual_fn, RunRecord{});
}

RunRecord qsm_run(const QuasiSubgradientOracle& oracle,
                  const ConvexRegion& region, const StepSchedule& steps,
                  const Point& x1, const RunOptions& opts,
                  const Operator* residual_op) {
  require(all_finite(x1), "qsm_run: non-finite initial point");

  const std::size_t n = x1.size();
  RunRecord seed;
  EvalScratch scratch;
  Point shifted(n);
  double inner_time = 0.0;
  std::string abort_message;

  auto step_fn = [&](long k, const Point& x, const Point& g, Point& out) {
    const double v = steps.at(k);
    kern::axpby(1.0, x.data(), -v, g.data(), shifted.data(), n);
    const auto t0 = Clock::now();
    ProjectionReport rep =
        dykstra_project(region, shifted, v / 10.0, opts.qsm_max_sweeps);
    inner_time += seconds_since(t0);
    if (rep.infeasible_suspected) {
      abort_message = "inner projection flagged an infeasible region at "
                      "iteration " +
                      std::to_string(k);
      return false;
    }
    out = std::move(rep.point);
    return true;
  };
  auto residual_fn = [&](const Point& x) {
    if (residual_op) return fixed_point_residual(*residual_op, x, scratch);
    return region_max_violation(region, x);
  };

  RunRecord record =
      run_loop(oracle, x1, opts, step_fn, residual_fn, std::move(seed));
  record.inner_solver_time = inner_time;
  if (record.stop_reason == StopReason::aborted &&
      record.abort_message.empty())
    record.abort_message = abort_message;
  return record;
}

std::vector<bool> lemma1_check(const RunRecord& record,
                               const DiagnosticOracle& diag,
                               const StepSchedule& steps,
                               const AlphaSchedule& alphas, double slack) {
  require(record.trace_stride == 1,
          "lemma1_check: needs an undownsampled trace");
  require(record.point_trace.size() ==
              static_cast<std::size_t>(record.iterations),
          "lemma1_check: needs a run recorded with points");

  std::vector<bool> results;
  for (long k = 1; k + 1 <= record.iterations; ++k) {
    const double fx = record.value_trace[static_cast<std::size_t>(k - 1)];
    if (!(fx > diag.f_star)) continue;  // lemma hypothesis f* < f(x_k)
    const Point& xk = record.point_trace[static_cast<std::size_t>(k - 1)];
    const Point& xk1 = record.point_trace[static_cast<std::size_t>(k)];
    const double v = steps.at(k);
    const double alpha = alphas.at(k);
    const double lhs = kern::dist2sq(xk1.data(), diag.x_star.data(),
                                     xk1.size());
    const double gap = std::pow((fx - diag.f_star) / diag.L, 1.0 / diag.beta);
    const double rhs = kern::dist2sq(xk.data(), diag.x_star.data(), xk.size()) -
                       2.0 * v * (1.0 - alpha) * gap +
                       (1.0 - alpha) * v * v;
    results.push_back(lhs <= rhs + slack);
  }
  return results;
}

bool rate_bound_check(const RunRecord& record, const DiagnosticOracle& diag,
                      double c, double alpha, double slack) {
  require(record.trace_stride == 1,
          "rate_bound_check: needs an undownsampled trace");
  require(!record.point_trace.empty(),
          "rate_bound_check: needs a run recorded with points");
  require(c > 0.0 && alpha > 0.0 && alpha < 1.0,
          "rate_bound_check: bad schedule parameters");

  const Point& x1 = record.point_trace.front();
  const double d1sq = kern::dist2sq(x1.data(), diag.x_star.data(), x1.size());
  const double numer = d1sq + 2.0 * c * c * (1.0 - alpha);
  const double denom_coef = 2.0 * c * (1.0 - alpha);

  double best = std::numeric_limits<double>::infinity();
  for (long k = 1; k <= record.iterations; ++k) {
    best = std::min(best, record.value_trace[static_cast<std::size_t>(k - 1)]);
    const double bound =
        diag.L * std::pow(numer / (denom_coef * std::log(static_cast<double>(
                                       k + 1))),
                          diag.beta);
    if (best - diag.f_star > bound + slack) return false;
  }
  return true;
}

}  // namespace fpqs
