#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fpqs/kernels.hpp"
#include "fpqs/rng.hpp"

using namespace fpqs;

namespace {

struct BackendGuard {
  kern::Backend saved = kern::active_backend();
  ~BackendGuard() { kern::force_backend(saved); }
};

std::vector<double> random_vec(rng::Stream& s, std::size_t n, double lo,
                               double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = s.uniform_in(lo, hi);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  BackendGuard guard;
  kern::force_backend(kern::Backend::scalar);
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  CHECK(kern::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
  CHECK(kern::nrm2sq(a.data(), 3) == doctest::Approx(14.0));
  CHECK(kern::dist2sq(a.data(), b.data(), 3) == doctest::Approx(67.0));

  std::vector<double> out(3);
  kern::axpby(2.0, a.data(), -1.0, b.data(), out.data(), 3);
  CHECK(out == std::vector<double>{-2, 9, 0});

  out = {1, 1, 1};
  kern::accum(0.5, a.data(), out.data(), 3);
  CHECK(out == std::vector<double>{1.5, 2, 2.5});

  const std::vector<double> lo{0, 0, 0}, hi{2, 2, 2};
  kern::clamp(b.data(), lo.data(), hi.data(), out.data(), 3);
  CHECK(out == std::vector<double>{2, 0, 2});
}

TEST_CASE("clamp handles infinite bounds") {
  BackendGuard guard;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> x{-3, 4}, lo{0, -inf}, hi{inf, inf};
  std::vector<double> out(2);
  for (auto backend : {kern::Backend::scalar, kern::Backend::avx2}) {
    if (!kern::backend_supported(backend)) continue;
    kern::force_backend(backend);
    kern::clamp(x.data(), lo.data(), hi.data(), out.data(), 2);
    CHECK(out == std::vector<double>{0, 4});
  }
}

TEST_CASE("simd variants agree with the scalar reference") {
  if (!kern::backend_supported(kern::Backend::avx2)) {
    MESSAGE("avx2 not available; equivalence suite skipped");
    return;
  }
  BackendGuard guard;
  rng::Stream stream(2024, 7);
  // odd lengths exercise the vector tails
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 8u, 13u, 100u, 1003u}) {
    const auto a = random_vec(stream, n, -10.0, 10.0);
    const auto b = random_vec(stream, n, -10.0, 10.0);

    kern::force_backend(kern::Backend::scalar);
    const double dot_s = kern::dot(a.data(), b.data(), n);
    const double nrm_s = kern::nrm2sq(a.data(), n);
    const double dst_s = kern::dist2sq(a.data(), b.data(), n);
    std::vector<double> axpby_s(n), accum_s = b, clamp_s(n);
    kern::axpby(1.25, a.data(), -0.5, b.data(), axpby_s.data(), n);
    kern::accum(0.75, a.data(), accum_s.data(), n);
    std::vector<double> lo(n, -5.0), hi(n, 5.0);
    kern::clamp(a.data(), lo.data(), hi.data(), clamp_s.data(), n);

    kern::force_backend(kern::Backend::avx2);
    const double scale = 1.0 + static_cast<double>(n);
    CHECK(kern::dot(a.data(), b.data(), n) ==
          doctest::Approx(dot_s).epsilon(1e-13).scale(scale));
    CHECK(kern::nrm2sq(a.data(), n) ==
          doctest::Approx(nrm_s).epsilon(1e-13).scale(scale));
    CHECK(kern::dist2sq(a.data(), b.data(), n) ==
          doctest::Approx(dst_s).epsilon(1e-13).scale(scale));

    // elementwise kernels reassociate nothing, so they match bit for bit
    std::vector<double> axpby_v(n), accum_v = b, clamp_v(n);
    kern::axpby(1.25, a.data(), -0.5, b.data(), axpby_v.data(), n);
    kern::accum(0.75, a.data(), accum_v.data(), n);
    kern::clamp(a.data(), lo.data(), hi.data(), clamp_v.data(), n);
    CHECK(axpby_v == axpby_s);
    CHECK(accum_v == accum_s);
    CHECK(clamp_v == clamp_s);
  }
}

TEST_CASE("forcing an unsupported backend throws") {
  if (kern::backend_supported(kern::Backend::avx2)) return;
  CHECK_THROWS_AS(kern::force_backend(kern::Backend::avx2),
                  std::invalid_argument);
}

}  // TEST_SUITE
