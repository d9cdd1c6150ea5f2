#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpqs/operators.hpp"
#include "fpqs/point.hpp"
#include "fpqs/projection.hpp"
#include "fpqs/solver.hpp"
#include "fpqs/subgradients.hpp"

// Benchmark problems. The production-efficiency benchmark minimizes the
// Cobb-Douglas ratio objective subject to m two-sided affine funding
// constraints p_lo_i <= <b_i, x> <= p_hi_i inside the box D = [0, M]^n.
// Three generated families differ in the constraint ranges: "unbounded"
// (no upper bounds, M infinite), "bounded" (both bounds, M = 100), and
// "gcfs" (independent bounds with at least one guaranteed conflict, so the
// constraint sets cannot all intersect and the surrogate feasible set is
// used). Synthetic diagnostic problems with known minimizers back the
// convergence checks.

namespace fpqs {

struct CobbDouglasConstraint {
  Point b;
  double p_lo = 0.0;
  double p_hi = std::numeric_limits<double>::infinity();
};

struct CobbDouglasInstance {
  int n = 0;
  int m = 0;
  double a0 = 1.0;
  double c0 = 1.0;
  Point a;  // positive, sums to 1
  Point c;  // positive
  std::vector<CobbDouglasConstraint> constraints;
  double box_bound = std::numeric_limits<double>::infinity();  // M
  std::string case_label = "custom";
  std::uint64_t seed = 0;

  void validate() const;
  CobbDouglasObjective objective() const;
  Box domain_box() const;               // [0, M]^n
  ConvexRegion feasible_region() const;  // constraint half spaces + box

  nlohmann::json to_json() const;
  static CobbDouglasInstance from_json(const nlohmann::json& j);
};

double cobb_douglas_value(const CobbDouglasInstance& inst, const Point& x);
SubgradResult cobb_douglas_subgradient(const CobbDouglasInstance& inst,
                                       const Point& x);
QuasiSubgradientOracle cobb_douglas_oracle(const CobbDouglasInstance& inst);

// Firmly nonexpansive mapping whose fixed point set is the intersection of
// the constraint half spaces: T = (Id + Tt)/2 where Tt averages the paired
// lower/upper half-space projections over the m constraints. An infinite
// p_hi contributes the identity for that half.
Operator build_constraint_operator(const CobbDouglasInstance& inst);

// Firmly nonexpansive mapping whose fixed point set is the surrogate
// feasible set: minimizers over the box D of the uniformly weighted mean
// square distance to the 2m constraint half spaces.
Operator build_gcfs_operator(const CobbDouglasInstance& inst);

// Deterministic instance generation; all parameters are drawn from the
// instance stream of the given seed, in declaration order.
CobbDouglasInstance gen_unbounded_case(int n, int m, std::uint64_t seed);
CobbDouglasInstance gen_bounded_case(int n, int m, std::uint64_t seed);
CobbDouglasInstance gen_gcfs_case(int n, int m, std::uint64_t seed);

struct DiagnosticProblem {
  std::string name;
  QuasiSubgradientOracle oracle;
  DiagnosticOracle diag;
  Operator T;
  Operator P_D;
};

// f(x) = ||x||, minimized at the origin (L = 1, beta = 1).
DiagnosticProblem diagnostic_norm_problem(int dim);

// f(x) = min(||x||, alpha), the capped norm.
DiagnosticProblem diagnostic_capped_problem(int dim, double alpha);

// f(x) = max(||x|| - radius, 0); the whole closed ball is optimal, so the
// solution set has nonempty interior.
DiagnosticProblem diagnostic_hinge_problem(int dim, double radius);

}  // namespace fpqs
