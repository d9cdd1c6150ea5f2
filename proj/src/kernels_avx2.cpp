// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and only entered after a runtime CPU check, so the rest of
// the library can stay at the baseline ISA.

#if defined(FPQS_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>

namespace fpqs::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq(const double* a, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

double dist2sq(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// The elementwise kernels use separate mul and add (no FMA) so that they
// produce exactly the scalar reference results; only the reductions, whose
// lane accumulators reassociate the sum anyway, use FMA.

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d tx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d ty = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(tx, ty));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void accum(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(t, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_min_pd(
        _mm256_max_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(lo + i)),
        _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
    const double v = x[i] > lo[i] ? x[i] : lo[i];
    out[i] = v < hi[i] ? v : hi[i];
  }
}

}  // namespace fpqs::kern::avx2

#endif  // FPQS_HAVE_AVX2
