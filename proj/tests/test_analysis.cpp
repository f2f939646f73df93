#include <cmath>
#include <vector>

#include "corrint/analysis.hpp"
#include "corrint/model.hpp"
#include "doctest.h"

using namespace corrint;

namespace {

std::vector<double> fringes(double period, double shift = 0.0, double n = 1000, double ds = 0.01) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 - std::cos(2 * M_PI * (ds * double(i) - shift) / period);
  return v;
}

Field blobs(std::vector<std::pair<double, double>> centres, double width) {
  Field f;
  f.axes = {{"x1", -10, 10, 81}, {"X", -10, 10, 81}};
  f.allocate();
  for (std::size_t i = 0; i < 81; ++i)
    for (std::size_t j = 0; j < 81; ++j)
      for (auto [a, b] : centres) {
        const double dx = f.axes[0].at(i) - a, dy = f.axes[1].at(j) - b;
        f.at(i, j) += std::exp(-(dx * dx + dy * dy) / (2 * width * width));
      }
  return f;
}

}  // namespace

TEST_CASE("period of a synthetic cosine") {
  const auto v = fringes(0.5);
  const FringeEstimate e = fringe_period(v, 0.01);
  REQUIRE(e.found);
  CHECK(e.period == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("constant and plain Gaussian slices have no fringe") {
  const std::vector<double> c(500, 2.0);
  CHECK_FALSE(fringe_period(c, 0.01).found);
  CHECK(visibility(c, 0.01) == 0.0);
  std::vector<double> g(500);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-std::pow((double(i) - 250.0) / 40.0, 2));
  CHECK_FALSE(fringe_period(g, 0.01).found);
}

TEST_CASE("period is invariant under affine rescaling") {
  auto v = fringes(0.37);
  const double p = fringe_period(v, 0.01).period;
  for (auto& x : v) x = 3.5 * x + 0.25;
  CHECK(fringe_period(v, 0.01).period == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("visibility") {
  const auto v = fringes(0.5);
  CHECK(visibility(v, 0.01) == doctest::Approx(1.0).epsilon(1e-3));
  auto w = v;
  for (auto& x : w) x *= 7.0;
  CHECK(visibility(w, 0.01) == doctest::Approx(visibility(v, 0.01)).epsilon(1e-12));

  // Gaussian envelope does not bias the contrast
  std::vector<double> e(2000);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double s = 0.01 * double(i) - 10.0;
    e[i] = std::exp(-s * s / 18.0) * (1.0 + 0.5 * std::cos(2 * M_PI * s / 0.4));
  }
  CHECK(visibility(e, 0.01, 700, 1300) == doctest::Approx(0.5).epsilon(0.05));

  const std::vector<double> zero(100, 0.0);
  CHECK_THROWS_AS(visibility(zero, 0.01), NumericalError);
  CHECK_THROWS_AS(visibility(v, 0.01, 5, 5), ConfigError);
}

TEST_CASE("ridge counting") {
  CHECK(ridge_count(blobs({{0, 0}}, 1.5), 0.1) == 1);
  CHECK(ridge_count(blobs({{-5, -5}, {5, 5}}, 1.0), 0.5) == 2);
  // diagonal neighbours connect
  Field f;
  f.axes = {{"x1", 0, 1, 3}, {"X", 0, 1, 3}};
  f.values = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(ridge_count(f, 0.5) == 1);
  CHECK_THROWS_AS(ridge_count(f, 1.0), ConfigError);
  Field empty;
  CHECK_THROWS_AS(ridge_count(empty, 0.5), ConfigError);
}

TEST_CASE("phase shifts") {
  const auto a = fringes(0.5, 0.0);
  CHECK(std::abs(phase_shift(a, a, 0.01)) < 1e-12);
  const auto b = fringes(0.5, 0.25);
  CHECK(std::abs(phase_shift(a, b, 0.01)) == doctest::Approx(M_PI).epsilon(0.01));
  const auto q = fringes(0.5, 0.125);
  CHECK(std::abs(phase_shift(a, q, 0.01)) == doctest::Approx(M_PI / 2).epsilon(0.01));
  CHECK_THROWS_AS(phase_shift(a, fringes(0.6), 0.01), NumericalError);
}

TEST_CASE("positive run") {
  const std::vector<double> v{0, 1, 2, 0, 3, 4, 5, 0};
  const auto [b, e] = positive_run(v);
  CHECK(b == 4);
  CHECK(e == 7);
}

TEST_CASE("raising the threshold can split a ridge") {
  // two blobs joined by a saddle: one component at low threshold, two above the saddle
  const Field f = blobs({{-2, 0}, {2, 0}}, 1.5);
  CHECK(ridge_count(f, 0.2) == 1);
  CHECK(ridge_count(f, 0.9) == 2);
}
