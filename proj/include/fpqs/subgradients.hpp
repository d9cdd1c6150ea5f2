#pragma once

#include <functional>

#include "fpqs/point.hpp"

// Unit quasi-subgradient oracles. For a quasiconvex f, a quasi-subgradient
// at x is any g with <g, y - x> <= 0 for every y in the strict sublevel set
// {y : f(y) < f(x)}; the oracles below return such a g normalized to unit
// length. When the raw subgradient vanishes (x minimizes f, where the
// quasi-subdifferential is the whole space) the result carries the
// at_minimum flag and a placeholder unit vector.

namespace fpqs {

struct SubgradResult {
  Point g;
  bool at_minimum = false;
};

struct QuasiSubgradientOracle {
  std::function<double(const Point&)> value;
  std::function<SubgradResult(const Point&)> unit_subgrad;
};

// g_raw / ||g_raw||; flags at_minimum and substitutes e_1 when
// ||g_raw|| < eps.
SubgradResult unit_normalize(Point g_raw, double eps = 1e-14);

// Ratio objective f = a/b with convex numerator a and affine positive
// denominator b(x) = <c, x> + c0. The convex functional a - f(x)*b has its
// Fenchel subdifferential contained in the quasi-subdifferential of f, so
// a unit quasi-subgradient is normalize(subgrad_a(x) - f(x)*c).
struct FractionalObjective {
  std::function<double(const Point&)> numerator;
  std::function<Point(const Point&)> numerator_subgrad;
  Point c;
  double c0 = 1.0;
};

double fractional_value(const FractionalObjective& obj, const Point& x);
SubgradResult fractional_subgradient(const FractionalObjective& obj,
                                     const Point& x);
QuasiSubgradientOracle make_fractional_oracle(FractionalObjective obj);

// f(x) = min(||x||, alpha): g = x/||x||, at_minimum at the origin.
double capped_norm_value(double alpha, const Point& x);
SubgradResult capped_norm_subgradient(const Point& x);
QuasiSubgradientOracle make_capped_norm_oracle(double alpha);

// f(x) = ||x||.
QuasiSubgradientOracle make_norm_oracle();

// f(x) = max(||x|| - radius, 0); minimized on the closed ball, so
// at_minimum fires anywhere inside it.
QuasiSubgradientOracle make_hinge_norm_oracle(double radius);

// Production-efficiency ratio: f(x) = -a0 * prod_j x_j^{a_j} / (<c,x> + c0)
// on the nonnegative orthant, extended by 0 elsewhere. The weights a_j are
// positive and sum to 1; c is positive and c0 > 0. The product is evaluated
// in log space.
struct CobbDouglasObjective {
  double a0 = 1.0;
  Point a;
  Point c;
  double c0 = 1.0;
};

double cobb_douglas_value(const CobbDouglasObjective& obj, const Point& x);

// Interior points get the normalized gradient direction; points with some
// x_j <= 0 (where f = 0) get -sum_{j: x_j <= 0} e_j normalized, which
// separates from the strict sublevel set because that set lies in the
// positive orthant.
SubgradResult cobb_douglas_subgradient(const CobbDouglasObjective& obj,
                                       const Point& x);
QuasiSubgradientOracle make_cobb_douglas_oracle(CobbDouglasObjective obj);

}  // namespace fpqs
