#pragma once

#include <cstddef>
#include <string>

// Dense double-precision vector kernels behind every inner loop of the
// library (projections, operator averaging, subgradient steps, Dykstra
// sweeps). A scalar reference implementation always exists; an AVX2+FMA
// variant is selected at runtime when the CPU supports it. The environment
// variable FPQS_KERNELS=scalar|avx2|auto overrides the choice, and
// force_backend() does the same programmatically (used by the equivalence
// tests). The selection is fixed per process, so repeated runs of the same
// binary on the same machine evaluate bit-identically.

namespace fpqs::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void force_backend(Backend b);  // throws std::invalid_argument if unsupported
const char* backend_name(Backend b);

// <a, b>
double dot(const double* a, const double* b, std::size_t n);

// sum a_i^2
double nrm2sq(const double* a, std::size_t n);

// sum (a_i - b_i)^2
double dist2sq(const double* a, const double* b, std::size_t n);

// out_i = a*x_i + b*y_i; out may alias x or y
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);

// y_i += a*x_i
void accum(double a, const double* x, double* y, std::size_t n);

// out_i = min(max(x_i, lo_i), hi_i); lo/hi entries may be +-infinity
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n);

}  // namespace fpqs::kern
