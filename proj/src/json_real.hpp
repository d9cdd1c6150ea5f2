#pragma once

// JSON has no infinity literal; infinite bounds are encoded as the strings
// "inf" / "-inf". Internal helper shared by the serialization code.

#include <limits>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "fpqs/point.hpp"

namespace fpqs::detail {

inline nlohmann::json real_to_json(double v) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (v == inf) return "inf";
  if (v == -inf) return "-inf";
  return v;
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf")
      return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("bad real value: " + s);
  }
  return j.get<double>();
}

inline nlohmann::json reals_to_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (double v : p) a.push_back(real_to_json(v));
  return a;
}

inline Point reals_from_json(const nlohmann::json& j) {
  Point p;
  p.reserve(j.size());
  for (const auto& v : j) p.push_back(real_from_json(v));
  return p;
}

}  // namespace fpqs::detail
