#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpqs/projection.hpp"
#include "fpqs/rng.hpp"
#include "test_util.hpp"

using namespace fpqs;
using testutil::random_point;

namespace {

// Random 2D region: the unit box plus up to three half spaces, all built
// to keep a margin-0.05 ball around an interior anchor feasible.
ConvexRegion random_region(rng::Stream& stream, int num_halfspaces) {
  ConvexRegion region;
  const Point anchor = random_point(stream, 2, 0.25, 0.75);
  for (int i = 0; i < num_halfspaces; ++i) {
    HalfSpace hs;
    do {
      hs.b = random_point(stream, 2, -1.0, 1.0);
    } while (norm(hs.b) < 0.1);
    const double margin = 0.05 * norm(hs.b);
    if (stream.uniform() < 0.5) {
      hs.sense = HalfSpace::Sense::upper;
      hs.threshold = dot(hs.b, anchor) + margin;
    } else {
      hs.sense = HalfSpace::Sense::lower;
      hs.threshold = dot(hs.b, anchor) - margin;
    }
    region.halfspaces.push_back(std::move(hs));
  }
  region.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  return region;
}

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("two half spaces meet at the corner") {
  ConvexRegion region;
  region.halfspaces.push_back({{1.0, 0.0}, 1.0, HalfSpace::Sense::lower});
  region.halfspaces.push_back({{0.0, 1.0}, 1.0, HalfSpace::Sense::lower});

  const ProjectionReport rep = dykstra_project(region, {0.0, 0.0}, 1e-8);
  CHECK(rep.converged);
  CHECK(dist(rep.point, {1.0, 1.0}) < 1e-6);

  const Point grid =
      testutil::grid_project_2d(region, {0.0, 0.0}, 0.0, 2.0, 5);
  CHECK(std::abs(dist(rep.point, {0.0, 0.0}) - dist(grid, {0.0, 0.0})) < 1e-5);
}

TEST_CASE("single half space matches the closed form") {
  rng::Stream stream(404, 1);
  for (int i = 0; i < 25; ++i) {
    HalfSpace hs;
    do {
      hs.b = random_point(stream, 2, -1.0, 1.0);
    } while (norm(hs.b) < 0.1);
    hs.threshold = stream.uniform_in(-1.0, 1.0);
    hs.sense = stream.uniform() < 0.5 ? HalfSpace::Sense::lower
                                      : HalfSpace::Sense::upper;
    ConvexRegion region;
    region.halfspaces.push_back(hs);
    const Point z = random_point(stream, 2, -3.0, 3.0);
    const ProjectionReport rep = dykstra_project(region, z, 1e-8);
    CHECK(dist(rep.point, project_halfspace(hs, z)) < 1e-9);
  }
}

TEST_CASE("feasible input needs no sweeps") {
  ConvexRegion region;
  region.halfspaces.push_back({{1.0, 0.0}, 1.0, HalfSpace::Sense::upper});
  region.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  const ProjectionReport rep = dykstra_project(region, {0.5, 0.5}, 1e-8);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(rep.point == Point{0.5, 0.5});
}

TEST_CASE("tolerance must be positive") {
  ConvexRegion region;
  region.box = Box{{0.0}, {1.0}};
  CHECK_THROWS_AS(dykstra_project(region, {2.0}, 0.0), std::invalid_argument);
}

TEST_CASE("agrees with the brute-force oracles on random regions") {
  rng::Stream stream(1234, 5);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ConvexRegion region = random_region(stream, 1 + trial % 3);
    const Point z = random_point(stream, 2, -1.0, 2.0);
    const ProjectionReport rep = dykstra_project(region, z, 1e-8);
    REQUIRE(rep.converged);
    // exact answer by face enumeration
    const Point face = testutil::face_project_2d(region, z);
    CHECK(std::abs(dist(rep.point, z) - dist(face, z)) < 1e-5);
    // the grid point is feasible, so its distance can only be an upper
    // bound on the optimum
    const Point grid = testutil::grid_project_2d(region, z, 0.0, 1.0, 5);
    CHECK(dist(rep.point, z) <= dist(grid, z) + 1e-5);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("violation settles monotonically on feasible regions") {
  // The very first sweeps can raise the max violation while the correction
  // terms equilibrate; from the midpoint of the run onward the violation
  // decreases sweep over sweep and ends below the stop threshold.
  rng::Stream stream(555, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const ConvexRegion region = random_region(stream, 3);
    const Point z = random_point(stream, 2, -2.0, 3.0);
    const ProjectionReport rep =
        dykstra_project(region, z, 1e-10, 100000, /*record_violations=*/true);
    REQUIRE(rep.converged);
    CHECK(rep.max_violation <= 1e-11);
    const auto& trace = rep.violation_trace;
    for (std::size_t s = std::max<std::size_t>(1, trace.size() / 2);
         s < trace.size(); ++s)
      CHECK(trace[s] <= trace[s - 1] + 1e-12);
  }
}

TEST_CASE("regions round-trip through json") {
  rng::Stream stream(2001, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const ConvexRegion region = random_region(stream, 1 + trial % 3);
    const ConvexRegion copy = ConvexRegion::from_json(region.to_json());
    CHECK(copy.to_json() == region.to_json());
    // same geometry: identical projections
    const Point z = random_point(stream, 2, -2.0, 2.0);
    const ProjectionReport a = dykstra_project(region, z, 1e-8);
    const ProjectionReport b = dykstra_project(copy, z, 1e-8);
    CHECK(a.point == b.point);
  }

  // infinite box bounds survive the trip
  ConvexRegion orthant;
  orthant.box = Box{{0.0, 0.0},
                    {std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()}};
  const ConvexRegion back = ConvexRegion::from_json(orthant.to_json());
  REQUIRE(back.box.has_value());
  CHECK(back.box->upper[0] == std::numeric_limits<double>::infinity());
}

TEST_CASE("reports are deterministic") {
  ConvexRegion region;
  region.halfspaces.push_back({{1.0, 0.7}, 1.3, HalfSpace::Sense::lower});
  region.halfspaces.push_back({{-0.3, 1.0}, 0.2, HalfSpace::Sense::upper});
  region.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  const Point z{-0.4, 1.9};
  const ProjectionReport a = dykstra_project(region, z, 1e-9);
  const ProjectionReport b = dykstra_project(region, z, 1e-9);
  CHECK(a.point == b.point);  // bit identical
  CHECK(a.iterations == b.iterations);
  CHECK(a.max_violation == b.max_violation);
  CHECK(a.achieved_tol == b.achieved_tol);
}

TEST_CASE("conflicting half spaces are flagged infeasible") {
  ConvexRegion region;
  region.halfspaces.push_back({{1.0}, 0.0, HalfSpace::Sense::upper});  // x<=0
  region.halfspaces.push_back({{1.0}, 1.0, HalfSpace::Sense::lower});  // x>=1
  const ProjectionReport rep = dykstra_project(region, {0.5}, 1e-4, 100000);
  CHECK(rep.infeasible_suspected);
  CHECK_FALSE(rep.converged);
  CHECK(rep.max_violation > 1e-4);
}

TEST_CASE("exact special-case projections") {
  // delegation: one half space
  ConvexRegion one_hs;
  one_hs.halfspaces.push_back({{1.0, 0.0}, 1.0, HalfSpace::Sense::upper});
  auto p = exact_project_special(one_hs, {2.0, 3.0});
  REQUIRE(p.has_value());
  CHECK(dist(*p, {1.0, 3.0}) == 0.0);

  // delegation: box only
  ConvexRegion box_only;
  box_only.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  p = exact_project_special(box_only, {2.0, -1.0});
  REQUIRE(p.has_value());
  CHECK(dist(*p, {1.0, 0.0}) == 0.0);

  // empty region means the whole space
  CHECK(exact_project_special(ConvexRegion{}, {4.0, 4.0}).has_value());

  // box + one half space in 2D, z outside both, versus the brute-force
  // face enumeration
  rng::Stream stream(8080, 2);
  for (int trial = 0; trial < 50; ++trial) {
    ConvexRegion region = random_region(stream, 1);
    const Point z = random_point(stream, 2, 1.0, 2.5);
    const auto exact = exact_project_special(region, z);
    REQUIRE(exact.has_value());
    const Point face = testutil::face_project_2d(region, z);
    CHECK(std::abs(dist(*exact, z) - dist(face, z)) < 1e-6);
    // and Dykstra agrees with the exact answer
    const ProjectionReport rep = dykstra_project(region, z, 1e-9);
    CHECK(dist(rep.point, *exact) < 1e-5);
  }

  // no closed form for two half spaces plus a box
  ConvexRegion two;
  two.halfspaces.push_back({{1.0, 0.0}, 1.0, HalfSpace::Sense::upper});
  two.halfspaces.push_back({{0.0, 1.0}, 1.0, HalfSpace::Sense::upper});
  two.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  CHECK_FALSE(exact_project_special(two, {2.0, 2.0}).has_value());
}

}  // TEST_SUITE
