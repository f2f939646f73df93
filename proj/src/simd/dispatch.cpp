#include <cstdlib>
#include <cstring>

#include "corrint/simd.hpp"

namespace corrint::simd {

#ifndef CORRINT_HAVE_AVX2
const Kernels* avx2_kernels() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend b = [] {
    const char* env = std::getenv("CORRINT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
    return (avx2_kernels() && cpu_has_avx2()) ? Backend::avx2 : Backend::scalar;
  }();
  return b;
}

const Kernels& kernels(Backend b) {
  if (b == Backend::avx2 && avx2_kernels() && cpu_has_avx2()) return *avx2_kernels();
  return scalar_kernels();
}

const Kernels& kernels() { return kernels(active_backend()); }

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace corrint::simd
