#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fpqs/problems.hpp"
#include "fpqs/rng.hpp"
#include "test_util.hpp"

using namespace fpqs;
using testutil::random_point;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CobbDouglasInstance one_constraint_instance() {
  CobbDouglasInstance inst;
  inst.n = 1;
  inst.m = 1;
  inst.a0 = 1.0;
  inst.c0 = 1.0;
  inst.a = {1.0};
  inst.c = {1.0};
  inst.constraints.push_back({{1.0}, 0.0, kInf});
  inst.box_bound = kInf;
  return inst;
}

// Iterate x <- T(x) until the fixed point residual drops below tol.
bool reaches_fixed_point(const Operator& T, Point x, double tol,
                         int max_iters) {
  EvalScratch scratch;
  Point next(x.size());
  for (int i = 0; i < max_iters; ++i) {
    T.eval(x, next, scratch);
    if (dist(next, x) < tol) return true;
    std::swap(x, next);
  }
  return false;
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("cobb-douglas objective value") {
  const CobbDouglasInstance inst = one_constraint_instance();
  CHECK(cobb_douglas_value(inst, {1.0}) == doctest::Approx(-0.5));
  CHECK(cobb_douglas_value(inst, {-2.0}) == 0.0);
  CHECK(cobb_douglas_value(inst, {0.0}) == 0.0);
}

TEST_CASE("value extends continuously by zero at the orthant boundary") {
  const CobbDouglasInstance inst = gen_unbounded_case(4, 2, 11);
  double prev = std::abs(cobb_douglas_value(inst, Point(4, 1.0)));
  for (double delta : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
    const double v = std::abs(cobb_douglas_value(inst, Point(4, delta)));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("constraint operator composes the paired projections") {
  const CobbDouglasInstance inst = one_constraint_instance();
  const Operator T = build_constraint_operator(inst);
  CHECK(T.tag() == OpTag::firmly_nonexpansive);
  // x=-2: lower projection gives 0, the infinite upper half is identity,
  // pair mean -1, then the halfway map gives -1.5
  const Point out = T(Point{-2.0});
  CHECK(out[0] == doctest::Approx(-1.5));

  // feasible points are fixed
  CHECK(T(Point{3.0})[0] == doctest::Approx(3.0));

  rng::Stream stream(5, 5);
  CHECK(testutil::nonexpansive_on_sample(T, 1000, stream, -10.0, 10.0));
  CHECK(testutil::firmly_nonexpansive_on_sample(T, 1000, stream, -10.0,
                                                10.0));
}

TEST_CASE("gcfs operator fixes points inside consistent constraints") {
  // two compatible one-dimensional bands around x = 5
  CobbDouglasInstance inst = one_constraint_instance();
  inst.m = 2;
  inst.constraints = {{{1.0}, 1.0, 8.0}, {{1.0}, 2.0, 9.0}};
  const Operator T = build_gcfs_operator(inst);
  for (double x : {2.0, 5.0, 7.9}) {  // inside the intersection [2, 8]
    CHECK(T(Point{x})[0] == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("gcfs operator settles conflicting bounds at the compromise") {
  // single constraint with p_hi < p_lo: members are P_{x>=2} and P_{x<=0},
  // X0 = [0, inf); the surrogate feasible set is {1}
  CobbDouglasInstance inst = one_constraint_instance();
  inst.constraints[0].p_lo = 2.0;
  inst.constraints[0].p_hi = 0.0;
  const Operator T = build_gcfs_operator(inst);
  CHECK(T.tag() == OpTag::firmly_nonexpansive);
  CHECK(T(Point{1.0})[0] == doctest::Approx(1.0));  // fixed point
  // Krasnoselskii-Mann iteration converges to it
  EvalScratch scratch;
  Point x{7.0};
  Point next(1);
  for (int i = 0; i < 2000; ++i) {
    T.eval(x, next, scratch);
    std::swap(x, next);
  }
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-6));

  rng::Stream stream(6, 6);
  CHECK(testutil::nonexpansive_on_sample(T, 1000, stream, -10.0, 10.0));
}

TEST_CASE("generated unbounded instances respect every declared range") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const CobbDouglasInstance inst = gen_unbounded_case(8, 6, seed);
    CHECK(inst.case_label == "unbounded");
    CHECK(inst.a0 > 0.0);
    CHECK(inst.a0 <= 10.0);
    CHECK(inst.c0 > 0.0);
    CHECK(inst.c0 <= 10.0);
    double asum = 0.0;
    for (double v : inst.a) {
      CHECK(v > 0.0);
      asum += v;
    }
    CHECK(asum == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : inst.c) {
      CHECK(v > 0.0);
      CHECK(v <= 10.0);
    }
    for (const auto& con : inst.constraints) {
      for (double v : con.b) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
      }
      CHECK(con.p_lo >= 0.0);
      CHECK(con.p_lo < 25.0 * norm(con.b));
      CHECK(con.p_hi == kInf);
    }
    CHECK(inst.box_bound == kInf);
  }
}

TEST_CASE("generated bounded instances respect every declared range") {
  for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
    const CobbDouglasInstance inst = gen_bounded_case(8, 6, seed);
    CHECK(inst.case_label == "bounded");
    CHECK(inst.box_bound == 100.0);
    for (const auto& con : inst.constraints) {
      const double bnorm = norm(con.b);
      CHECK(con.p_lo >= 0.0);
      CHECK(con.p_lo < 25.0 * bnorm);
      CHECK(con.p_hi > 75.0 * bnorm);
      CHECK(con.p_hi <= 100.0 * bnorm);
      CHECK(con.p_lo < con.p_hi);
    }
  }
}

TEST_CASE("bounded instances admit a feasible point") {
  rng::Stream stream(17, 8);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const CobbDouglasInstance inst = gen_bounded_case(10, 10, seed);
    const Operator T = build_constraint_operator(inst);
    Point x = random_point(stream, 10, 0.0, 100.0);
    CHECK(reaches_fixed_point(T, x, 1e-6, 100000));
  }
}

TEST_CASE("generated gcfs instances always carry a conflict") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const CobbDouglasInstance inst = gen_gcfs_case(8, 6, seed);
    CHECK(inst.case_label == "gcfs");
    CHECK(inst.box_bound == kInf);
    bool conflict = false;
    for (const auto& con : inst.constraints) {
      const double bnorm = norm(con.b);
      CHECK(con.p_lo >= 0.0);
      CHECK(con.p_lo < 100.0 * bnorm);
      CHECK(con.p_hi >= 0.0);
      CHECK(con.p_hi < 100.0 * bnorm);
      conflict = conflict || con.p_hi < con.p_lo;
    }
    CHECK(conflict);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const CobbDouglasInstance a = gen_bounded_case(6, 5, 42);
  const CobbDouglasInstance b = gen_bounded_case(6, 5, 42);
  CHECK(a.to_json() == b.to_json());
  const CobbDouglasInstance c = gen_bounded_case(6, 5, 43);
  CHECK(a.to_json() != c.to_json());
}

TEST_CASE("instances round-trip through json") {
  const CobbDouglasInstance inst = gen_gcfs_case(5, 4, 7);
  const CobbDouglasInstance copy =
      CobbDouglasInstance::from_json(inst.to_json());
  CHECK(copy.to_json() == inst.to_json());
  CHECK(copy.box_bound == inst.box_bound);
  CHECK(copy.constraints.size() == inst.constraints.size());

  // the generate-from-case shorthand
  const nlohmann::json shorthand{
      {"problem", "cobb_douglas"}, {"case", "gcfs"}, {"n", 5}, {"m", 4},
      {"seed", 7}};
  const CobbDouglasInstance gen = CobbDouglasInstance::from_json(shorthand);
  CHECK(gen.to_json() == inst.to_json());
}

TEST_CASE("diagnostic problems expose consistent solution data") {
  const DiagnosticProblem nrm = diagnostic_norm_problem(2);
  CHECK(nrm.oracle.value({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(nrm.oracle.value(nrm.diag.x_star) == nrm.diag.f_star);

  const DiagnosticProblem capped = diagnostic_capped_problem(2, 1.0);
  CHECK(capped.oracle.value({3.0, 4.0}) == doctest::Approx(1.0));
  CHECK(capped.oracle.value(capped.diag.x_star) == capped.diag.f_star);

  const DiagnosticProblem hinge = diagnostic_hinge_problem(2, 1.0);
  CHECK(hinge.oracle.value({3.0, 0.0}) == doctest::Approx(2.0));
  CHECK(hinge.oracle.value(hinge.diag.x_star) == hinge.diag.f_star);

  // Hoelder condition with L=1, beta=1 at the minimizer
  rng::Stream stream(3, 3);
  for (int i = 0; i < 1000; ++i) {
    const Point z = random_point(stream, 2, -10.0, 10.0);
    CHECK(std::abs(capped.oracle.value(z) - capped.diag.f_star) <=
          norm(z) + 1e-12);
    CHECK(std::abs(nrm.oracle.value(z) - nrm.diag.f_star) <=
          norm(z) + 1e-12);
  }
}

TEST_CASE("instance validation rejects bad parameter blocks") {
  CobbDouglasInstance inst = one_constraint_instance();
  inst.a = {0.5};  // does not sum to 1
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);

  inst = one_constraint_instance();
  inst.constraints[0].b = {0.0};
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);

  inst = one_constraint_instance();
  inst.c0 = 0.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

}  // TEST_SUITE
