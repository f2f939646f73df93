#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops shared by grid sampling and the split-step
// solver. Each kernel has a scalar reference and an AVX2 variant; the
// variant is picked once at runtime.
namespace corrint::simd {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

struct Kernels {
  // x[i] *= y[i]
  void (*cmul_inplace)(cplx* x, const cplx* y, std::size_t n);
  // y[i] += a * x[i]
  void (*caxpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // out[i] = |x[i]|^2
  void (*abs2)(const cplx* x, double* out, std::size_t n);
  // sum |x[i]|^2
  double (*abs2_sum)(const cplx* x, std::size_t n);
  // sum w[i] |x[i]|^2
  double (*weighted_abs2_sum)(const cplx* x, const double* w, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when AVX2 was not compiled in.
const Kernels* avx2_kernels();

bool cpu_has_avx2();
// AVX2 when the CPU supports it, unless CORRINT_SIMD=scalar.
Backend active_backend();
const Kernels& kernels();
const Kernels& kernels(Backend b);
std::string_view backend_name(Backend b);

}  // namespace corrint::simd
