#include "fpqs/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "json_real.hpp"

namespace fpqs {

using detail::real_from_json;
using detail::real_to_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double halfspace_distance(const HalfSpace& hs, const Point& x) {
  const double bx = dot(hs.b, x);
  const double deficit = hs.sense == HalfSpace::Sense::lower
                             ? hs.threshold - bx
                             : bx - hs.threshold;
  if (deficit <= 0.0) return 0.0;
  return deficit / norm(hs.b);
}

double box_distance(const Box& box, const Point& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = std::max({box.lower[j] - x[j], x[j] - box.upper[j], 0.0});
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

nlohmann::json ConvexRegion::to_json() const {
  nlohmann::json hs_arr = nlohmann::json::array();
  for (const auto& hs : halfspaces) {
    nlohmann::json b = nlohmann::json::array();
    for (double v : hs.b) b.push_back(v);
    hs_arr.push_back(
        {{"b", b},
         {"threshold", real_to_json(hs.threshold)},
         {"sense", hs.sense == HalfSpace::Sense::lower ? "lower" : "upper"}});
  }
  nlohmann::json j{{"halfspaces", hs_arr}};
  if (box) {
    nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
    for (double v : box->lower) lo.push_back(real_to_json(v));
    for (double v : box->upper) hi.push_back(real_to_json(v));
    j["box"] = {{"lower", lo}, {"upper", hi}};
  }
  return j;
}

ConvexRegion ConvexRegion::from_json(const nlohmann::json& j) {
  ConvexRegion region;
  if (j.contains("halfspaces")) {
    for (const auto& h : j.at("halfspaces")) {
      HalfSpace hs;
      for (const auto& v : h.at("b")) hs.b.push_back(v.get<double>());
      hs.threshold = real_from_json(h.at("threshold"));
      const std::string sense = h.at("sense").get<std::string>();
      if (sense != "lower" && sense != "upper")
        throw std::invalid_argument("region json: bad halfspace sense");
      hs.sense = sense == "lower" ? HalfSpace::Sense::lower
                                  : HalfSpace::Sense::upper;
      region.halfspaces.push_back(std::move(hs));
    }
  }
  if (j.contains("box")) {
    Box box;
    for (const auto& v : j.at("box").at("lower"))
      box.lower.push_back(real_from_json(v));
    for (const auto& v : j.at("box").at("upper"))
      box.upper.push_back(real_from_json(v));
    region.box = std::move(box);
  }
  return region;
}

double region_max_violation(const ConvexRegion& region, const Point& x) {
  double v = 0.0;
  for (const auto& hs : region.halfspaces)
    v = std::max(v, halfspace_distance(hs, x));
  if (region.box) v = std::max(v, box_distance(*region.box, x));
  return v;
}

ProjectionReport dykstra_project(const ConvexRegion& region, const Point& z,
                                 double tol, int max_sweeps,
                                 bool record_violations) {
  if (!(tol > 0.0))
    throw std::invalid_argument("dykstra_project: tol must be positive");

  const std::size_t n = z.size();
  const std::size_t num_sets =
      region.halfspaces.size() + (region.box ? 1u : 0u);

  ProjectionReport report;
  report.point = z;
  if (num_sets == 0) {  // whole space
    report.converged = true;
    return report;
  }
  if (region_max_violation(region, z) == 0.0) {  // already feasible
    report.converged = true;
    return report;
  }

  const double stop = tol / 10.0;
  std::vector<Point> corrections(num_sets, Point(n, 0.0));
  Point x = z;
  Point shifted(n), projected(n), prev(n);

  // Stagnation watch for infeasible-looking regions. A perfectly flat
  // violation is not enough evidence on its own: on polyhedral sets the
  // iterate can stall at a vertex for about ||z - x|| / violation sweeps
  // while the corrections grow, so the flat stretch must outlast that
  // bound before infeasibility is suspected.
  constexpr int kStagnationCheck = 100;
  double window_violation = kInf;
  long stagnant_sweeps = 0;

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    prev = x;
    // Sweep change is measured over the whole Dykstra state (iterate and
    // correction terms): on polyhedral sets the iterate can stall for many
    // sweeps while the corrections keep growing, so the iterate alone is
    // not a convergence signal.
    double correction_change_sq = 0.0;
    std::size_t set_idx = 0;
    for (const auto& hs : region.halfspaces) {
      Point& p = corrections[set_idx++];
      kern::axpby(1.0, x.data(), 1.0, p.data(), shifted.data(), n);
      projected = project_halfspace(hs, shifted);
      kern::axpby(1.0, shifted.data(), -1.0, projected.data(), shifted.data(),
                  n);  // new correction
      correction_change_sq = std::max(
          correction_change_sq, kern::dist2sq(shifted.data(), p.data(), n));
      p.assign(shifted.begin(), shifted.end());
      x = projected;
    }
    if (region.box) {
      Point& p = corrections[set_idx];
      kern::axpby(1.0, x.data(), 1.0, p.data(), shifted.data(), n);
      projected = project_box(*region.box, shifted);
      kern::axpby(1.0, shifted.data(), -1.0, projected.data(), shifted.data(),
                  n);
      correction_change_sq = std::max(
          correction_change_sq, kern::dist2sq(shifted.data(), p.data(), n));
      p.assign(shifted.begin(), shifted.end());
      x = projected;
    }

    const double violation = region_max_violation(region, x);
    const double change =
        std::max(dist(x, prev), std::sqrt(correction_change_sq));
    report.iterations = sweep;
    report.max_violation = violation;
    report.achieved_tol = std::max(change, violation);
    if (record_violations) report.violation_trace.push_back(violation);

    if (change <= stop && violation <= stop) {
      report.converged = true;
      break;
    }

    if (sweep % kStagnationCheck == 0) {
      const bool flat =
          std::abs(violation - window_violation) <= 1e-12 * (1.0 + violation);
      stagnant_sweeps = flat ? stagnant_sweeps + kStagnationCheck : 0;
      window_violation = violation;
      const double stall_bound =
          4.0 * dist(z, x) / std::max(violation, stop) + 300.0;
      if (violation > tol && flat &&
          static_cast<double>(stagnant_sweeps) > stall_bound) {
        report.infeasible_suspected = true;
        break;
      }
    }
  }

  report.point = std::move(x);
  return report;
}

namespace {

// Nearest point on the segment [a, b] to z.
Point segment_project(const Point& a, const Point& b, const Point& z) {
  Point d(z.size());
  kern::axpby(1.0, b.data(), -1.0, a.data(), d.data(), z.size());
  const double dd = norm_sq(d);
  if (dd == 0.0) return a;
  Point za(z.size());
  kern::axpby(1.0, z.data(), -1.0, a.data(), za.data(), z.size());
  const double t = std::clamp(dot(za, d) / dd, 0.0, 1.0);
  Point out(z.size());
  kern::axpby(1.0, a.data(), t, d.data(), out.data(), z.size());
  return out;
}

// Clip a convex polygon (CCW vertex list) by the feasible side of hs.
std::vector<Point> clip_polygon(const std::vector<Point>& poly,
                                const HalfSpace& hs) {
  const double sign = hs.sense == HalfSpace::Sense::upper ? 1.0 : -1.0;
  auto excess = [&](const Point& v) {
    return sign * (dot(hs.b, v) - hs.threshold);  // <= 0 means feasible
  };
  std::vector<Point> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % m];
    const double ec = excess(cur), en = excess(nxt);
    if (ec <= 0.0) out.push_back(cur);
    if ((ec < 0.0 && en > 0.0) || (ec > 0.0 && en < 0.0)) {
      const double t = ec / (ec - en);
      Point mid(cur.size());
      for (std::size_t j = 0; j < cur.size(); ++j)
        mid[j] = cur[j] + t * (nxt[j] - cur[j]);
      out.push_back(std::move(mid));
    }
  }
  return out;
}

}  // namespace

std::optional<Point> exact_project_special(const ConvexRegion& region,
                                           const Point& z) {
  const std::size_t num_hs = region.halfspaces.size();

  if (num_hs == 0 && !region.box) return z;
  if (num_hs == 1 && !region.box)
    return project_halfspace(region.halfspaces.front(), z);
  if (num_hs == 0 && region.box) return project_box(*region.box, z);

  if (num_hs == 1 && region.box && z.size() == 2) {
    const Box& box = *region.box;
    for (double v : box.lower)
      if (!std::isfinite(v)) return std::nullopt;
    for (double v : box.upper)
      if (!std::isfinite(v)) return std::nullopt;

    if (region_max_violation(region, z) == 0.0) return z;

    // Clip the box rectangle by the half space and project onto the
    // resulting polygon edge by edge.
    std::vector<Point> rect = {{box.lower[0], box.lower[1]},
                               {box.upper[0], box.lower[1]},
                               {box.upper[0], box.upper[1]},
                               {box.lower[0], box.upper[1]}};
    std::vector<Point> poly = clip_polygon(rect, region.halfspaces.front());
    if (poly.empty()) return std::nullopt;  // empty intersection
    if (poly.size() == 1) return poly.front();

    Point best = poly.front();
    double best_d2 = kern::dist2sq(best.data(), z.data(), 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point cand =
          segment_project(poly[i], poly[(i + 1) % poly.size()], z);
      const double d2 = kern::dist2sq(cand.data(), z.data(), 2);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = cand;
      }
    }
    return best;
  }

  return std::nullopt;
}

}  // namespace fpqs
