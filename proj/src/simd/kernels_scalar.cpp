#include "corrint/simd.hpp"

namespace corrint::simd {

namespace {

void cmul_inplace(cplx* x, const cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i].real(), b = x[i].imag();
    const double c = y[i].real(), d = y[i].imag();
    x[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

void abs2(const cplx* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
}

double abs2_sum(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

double weighted_abs2_sum(const cplx* x, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  return s;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{cmul_inplace, caxpy, abs2, abs2_sum, weighted_abs2_sum};
  return k;
}

}  // namespace corrint::simd
