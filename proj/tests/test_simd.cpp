#include <cmath>
#include <random>
#include <vector>

#include "corrint/simd.hpp"
#include "doctest.h"

using namespace corrint::simd;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  const Kernels* fast = avx2_kernels();
  if (!fast || !cpu_has_avx2()) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
    return;
  }
  const Kernels& ref = scalar_kernels();
  // odd lengths cover the remainder loops
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 64u, 1001u}) {
    CAPTURE(n);
    const auto x = random_vec(n, 1 + static_cast<unsigned>(n));
    const auto y = random_vec(n, 100 + static_cast<unsigned>(n));
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 + std::sin(0.1 * double(i));

    auto a = x, b = x;
    ref.cmul_inplace(a.data(), y.data(), n);
    fast->cmul_inplace(b.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (1 + std::abs(a[i])));

    a = y;
    b = y;
    ref.caxpy({0.3, -1.7}, x.data(), a.data(), n);
    fast->caxpy({0.3, -1.7}, x.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (1 + std::abs(a[i])));

    std::vector<double> pa(n), pb(n);
    ref.abs2(x.data(), pa.data(), n);
    fast->abs2(x.data(), pb.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-15));

    const double sa = ref.abs2_sum(x.data(), n), sb = fast->abs2_sum(x.data(), n);
    CHECK(std::abs(sa - sb) <= 1e-13 * (1 + sa));
    const double wa = ref.weighted_abs2_sum(x.data(), w.data(), n);
    const double wb = fast->weighted_abs2_sum(x.data(), w.data(), n);
    CHECK(std::abs(wa - wb) <= 1e-13 * (1 + std::abs(wa)));
  }
}

TEST_CASE("scalar kernels against direct formulas") {
  const Kernels& k = scalar_kernels();
  std::vector<cplx> x{{1, 2}, {3, -1}, {0, 0.5}};
  const std::vector<cplx> y{{0, 1}, {2, 0}, {-1, -1}};
  k.cmul_inplace(x.data(), y.data(), 3);
  CHECK(x[0] == cplx(-2, 1));
  CHECK(x[1] == cplx(6, -2));
  CHECK(x[2] == cplx(0.5, -0.5));
  CHECK(k.abs2_sum(y.data(), 3) == doctest::Approx(1 + 4 + 2));
}

TEST_CASE("dispatch picks a usable backend") {
  const Backend b = active_backend();
  CHECK((b == Backend::scalar || b == Backend::avx2));
  CHECK(&kernels(Backend::scalar) == &scalar_kernels());
  if (b == Backend::avx2) CHECK(cpu_has_avx2());
  CHECK(backend_name(Backend::avx2) == "avx2");
}
