#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fpqs/kernels.hpp"

namespace fpqs {

// A point of R^n. The vector length is the dimension.
using Point = std::vector<double>;

inline double dot(const Point& a, const Point& b) {
  return kern::dot(a.data(), b.data(), a.size());
}

inline double norm_sq(const Point& a) {
  return kern::nrm2sq(a.data(), a.size());
}

inline double norm(const Point& a) { return std::sqrt(norm_sq(a)); }

inline double dist(const Point& a, const Point& b) {
  return std::sqrt(kern::dist2sq(a.data(), b.data(), a.size()));
}

inline bool all_finite(const Point& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace fpqs
