#pragma once

#include <optional>
#include <vector>

#include "json.hpp"

#include "fpqs/operators.hpp"
#include "fpqs/point.hpp"

// Inexact metric projection onto an intersection of half spaces and a box,
// the per-iteration subproblem of the projection-based baseline solver.
// Dykstra's cyclic projection scheme (with correction terms) converges to
// the metric projection for convex sets, unlike plain alternating
// projection which only reaches feasibility.

namespace fpqs {

struct ConvexRegion {
  std::vector<HalfSpace> halfspaces;
  std::optional<Box> box;

  nlohmann::json to_json() const;
  static ConvexRegion from_json(const nlohmann::json& j);
};

// Largest Euclidean distance from x to any member set (0 when feasible).
double region_max_violation(const ConvexRegion& region, const Point& x);

struct ProjectionReport {
  Point point;
  int iterations = 0;       // completed sweeps over the set cycle
  double max_violation = 0.0;
  double achieved_tol = 0.0;
  bool converged = false;
  bool infeasible_suspected = false;
  std::vector<double> violation_trace;  // per sweep, only when requested
};

// Cycle order is half spaces in declaration order, box last. Stops once the
// change across a sweep and the max violation both fall below tol/10;
// flags infeasible_suspected when the violation stagnates above tol.
ProjectionReport dykstra_project(const ConvexRegion& region, const Point& z,
                                 double tol, int max_sweeps = 100000,
                                 bool record_violations = false);

// Exact projection when a closed form exists: a single half space, a box
// alone, or a finite 2D box with one half space. Empty region means the
// whole space. Returns nothing otherwise (or when the special region is
// empty).
std::optional<Point> exact_project_special(const ConvexRegion& region,
                                           const Point& z);

}  // namespace fpqs
