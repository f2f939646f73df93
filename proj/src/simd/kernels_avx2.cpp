// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "corrint/simd.hpp"

namespace corrint::simd {

namespace {

// Two complex numbers per register: [re0 im0 re1 im1].
inline __m256d mul2(__m256d x, __m256d y) {
  const __m256d yre = _mm256_movedup_pd(y);          // c c
  const __m256d yim = _mm256_permute_pd(y, 0xF);     // d d
  const __m256d xsw = _mm256_permute_pd(x, 0x5);     // b a
  return _mm256_fmaddsub_pd(x, yre, _mm256_mul_pd(xsw, yim));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cmul_inplace(cplx* x, const cplx* y, std::size_t n) {
  auto* xp = reinterpret_cast<double*>(x);
  const auto* yp = reinterpret_cast<const double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);
    const __m256d b = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(xp + 2 * i, mul2(a, b));
  }
  for (; i < n; ++i) x[i] *= y[i];
}

void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, mul2(xv, av)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void abs2(const cplx* x, double* out, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);      // r0 i0 r1 i1
    const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4);  // r2 i2 r3 i3
    const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));  // p0 p2 p1 p3
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(s, 0xD8));
  }
  for (; i < n; ++i) out[i] = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
}

double abs2_sum(const cplx* x, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);
    const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

double weighted_abs2_sum(const cplx* x, const double* w, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);
    const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4);
    const __m256d p = _mm256_permute4x64_pd(
        _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)), 0xD8);
    acc = _mm256_fmadd_pd(p, _mm256_loadu_pd(w + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  return s;
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{cmul_inplace, caxpy, abs2, abs2_sum, weighted_abs2_sum};
  return &k;
}

}  // namespace corrint::simd
