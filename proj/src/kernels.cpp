#include "fpqs/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace fpqs::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double dist2sq_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpby_scalar(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void accum_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void clamp_scalar(const double* x, const double* lo, const double* hi,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  double (*dist2sq)(const double*, const double*, std::size_t);
  void (*axpby)(double, const double*, double, const double*, double*,
                std::size_t);
  void (*accum)(double, const double*, double*, std::size_t);
  void (*clamp)(const double*, const double*, const double*, double*,
                std::size_t);
};

constexpr Table kScalar{dot_scalar, nrm2sq_scalar, dist2sq_scalar,
                        axpby_scalar, accum_scalar, clamp_scalar};

}  // namespace

#if defined(FPQS_HAVE_AVX2)
// defined in kernels_avx2.cpp, compiled with -mavx2 -mfma
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double nrm2sq(const double*, std::size_t);
double dist2sq(const double*, const double*, std::size_t);
void axpby(double, const double*, double, const double*, double*, std::size_t);
void accum(double, const double*, double*, std::size_t);
void clamp(const double*, const double*, const double*, double*, std::size_t);
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(FPQS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& table_for(Backend b) {
#if defined(FPQS_HAVE_AVX2)
  static const Table kAvx2{avx2::dot,   avx2::nrm2sq, avx2::dist2sq,
                           avx2::axpby, avx2::accum,  avx2::clamp};
  if (b == Backend::avx2) return kAvx2;
#else
  (void)b;
#endif
  return kScalar;
}

struct State {
  Backend backend;
  const Table* table;
};

State resolve_initial() {
  Backend b = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("FPQS_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) {
      b = Backend::scalar;
    } else if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) {
      b = Backend::avx2;
    }
    // "auto" or anything else keeps the detected default
  }
  return {b, &table_for(b)};
}

State& state() {
  static State s = resolve_initial();
  return s;
}

}  // namespace

Backend active_backend() { return state().backend; }

bool backend_supported(Backend b) {
  return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

void force_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument("kernel backend not supported on this CPU: " +
                                std::string(backend_name(b)));
  state() = {b, &table_for(b)};
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

double dot(const double* a, const double* b, std::size_t n) {
  return state().table->dot(a, b, n);
}

double nrm2sq(const double* a, std::size_t n) {
  return state().table->nrm2sq(a, n);
}

double dist2sq(const double* a, const double* b, std::size_t n) {
  return state().table->dist2sq(a, b, n);
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  state().table->axpby(a, x, b, y, out, n);
}

void accum(double a, const double* x, double* y, std::size_t n) {
  state().table->accum(a, x, y, n);
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  state().table->clamp(x, lo, hi, out, n);
}

}  // namespace fpqs::kern
