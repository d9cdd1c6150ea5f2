#include "fpqs/subgradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace fpqs {

SubgradResult unit_normalize(Point g_raw, double eps) {
  const double nrm = norm(g_raw);
  if (!(nrm >= eps)) {
    Point e1(g_raw.size(), 0.0);
    if (!e1.empty()) e1[0] = 1.0;
    return {std::move(e1), true};
  }
  const double inv = 1.0 / nrm;
  for (double& v : g_raw) v *= inv;
  return {std::move(g_raw), false};
}

double fractional_value(const FractionalObjective& obj, const Point& x) {
  const double den = dot(obj.c, x) + obj.c0;
  if (!(den > 0.0))
    throw std::domain_error("fractional objective: denominator <= 0");
  return obj.numerator(x) / den;
}

SubgradResult fractional_subgradient(const FractionalObjective& obj,
                                     const Point& x) {
  const double fx = fractional_value(obj, x);
  Point g = obj.numerator_subgrad(x);
  kern::accum(-fx, obj.c.data(), g.data(), g.size());
  return unit_normalize(std::move(g));
}

QuasiSubgradientOracle make_fractional_oracle(FractionalObjective obj) {
  auto shared = std::make_shared<FractionalObjective>(std::move(obj));
  return {
      [shared](const Point& x) { return fractional_value(*shared, x); },
      [shared](const Point& x) { return fractional_subgradient(*shared, x); },
  };
}

double capped_norm_value(double alpha, const Point& x) {
  return std::min(norm(x), alpha);
}

SubgradResult capped_norm_subgradient(const Point& x) {
  return unit_normalize(x);
}

QuasiSubgradientOracle make_capped_norm_oracle(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("capped norm: alpha must be positive");
  return {
      [alpha](const Point& x) { return capped_norm_value(alpha, x); },
      [](const Point& x) { return capped_norm_subgradient(x); },
  };
}

QuasiSubgradientOracle make_norm_oracle() {
  return {
      [](const Point& x) { return norm(x); },
      [](const Point& x) { return unit_normalize(x); },
  };
}

QuasiSubgradientOracle make_hinge_norm_oracle(double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("hinge norm: radius must be positive");
  return {
      [radius](const Point& x) { return std::max(norm(x) - radius, 0.0); },
      [radius](const Point& x) -> SubgradResult {
        if (norm(x) <= radius) {
          Point e1(x.size(), 0.0);
          e1[0] = 1.0;
          return {std::move(e1), true};
        }
        return unit_normalize(x);
      },
  };
}

namespace {

// log(a0 * prod x_j^{a_j}); -inf when some x_j == 0
double log_product(const CobbDouglasObjective& obj, const Point& x) {
  double s = std::log(obj.a0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) return -std::numeric_limits<double>::infinity();
    s += obj.a[j] * std::log(x[j]);
  }
  return s;
}

}  // namespace

double cobb_douglas_value(const CobbDouglasObjective& obj, const Point& x) {
  if (x.size() != obj.a.size())
    throw std::invalid_argument("cobb-douglas: dimension mismatch");
  for (double v : x)
    if (v < 0.0) return 0.0;
  const double lp = log_product(obj, x);
  if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
  return -std::exp(lp) / (dot(obj.c, x) + obj.c0);
}

SubgradResult cobb_douglas_subgradient(const CobbDouglasObjective& obj,
                                       const Point& x) {
  if (x.size() != obj.a.size())
    throw std::invalid_argument("cobb-douglas: dimension mismatch");
  const std::size_t n = x.size();

  bool interior = true;
  for (double v : x)
    if (v <= 0.0) {
      interior = false;
      break;
    }

  if (!interior) {
    // f(x) = 0 here and the strict sublevel set lies in (0, inf)^n, so
    // -e_j for each nonpositive coordinate separates it from x.
    Point g(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] <= 0.0) g[j] = -1.0;
    return unit_normalize(std::move(g));
  }

  // Direction of grad f. With q = a0*prod x^a and den = <c,x> + c0,
  // grad f = (q/den) * (c/den - a./x); q/den > 0 cancels under
  // normalization, which also keeps the computation safe from product
  // underflow at large n.
  const double den = dot(obj.c, x) + obj.c0;
  Point g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = obj.c[j] / den - obj.a[j] / x[j];
  return unit_normalize(std::move(g));
}

QuasiSubgradientOracle make_cobb_douglas_oracle(CobbDouglasObjective obj) {
  auto shared = std::make_shared<CobbDouglasObjective>(std::move(obj));
  return {
      [shared](const Point& x) { return cobb_douglas_value(*shared, x); },
      [shared](const Point& x) {
        return cobb_douglas_subgradient(*shared, x);
      },
  };
}

}  // namespace fpqs
