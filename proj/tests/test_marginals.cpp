#include <cmath>

#include "corrint/marginals.hpp"
#include "doctest.h"

using namespace corrint;

namespace {

SystemConfig overlapping() {
  SystemConfig c;
  c.particle1 = Body{1.0, 1.0, -0.01, 1.5};
  c.mirror = Body{20.0, 0.0, 0.0, 0.5};
  c.particle2 = Body{1.0, -1.0, 0.01, 1.5};
  return c;
}

SystemConfig separated() {
  SystemConfig c;
  c.particle1 = Body{1.0, 1.0, -30.0, 1.0};
  c.mirror = Body{20.0, 0.0, 0.0, 1.0};
  c.particle2 = Body{1.0, -1.0, 30.0, 1.0};
  c.amplitudes = {1, 0, 0, 0, 0};
  return c;
}

}  // namespace

TEST_CASE("separable state marginalizes to the particle product") {
  const WavegroupState s(separated());
  GridSpec g;
  g.axes = {{Coord::x1, -35.0, -25.0, 21}, {Coord::x2, 25.0, 35.0, 21}};
  const MarginalResult m = marginal_over_mirror(s, 0.0, g, Quadrature{1e-9, 40});
  CHECK(m.flagged.empty());
  double worst = 0.0;
  for (std::size_t i = 0; i < 21; ++i)
    for (std::size_t j = 0; j < 21; ++j) {
      const double want = std::norm(packet_eval(s.packet(0), m.field.axes[0].at(i), 0.0)) *
                          std::norm(packet_eval(s.packet(2), m.field.axes[1].at(j), 0.0));
      worst = std::max(worst, std::abs(m.field.at(i, j) - want));
    }
  CHECK(worst < 1e-6);

  const MarginalResult one =
      marginal_over_mirror_and_p2(s, 0.0, {Coord::x1, -36.0, -24.0, 241}, Quadrature{1e-8, 40});
  for (std::size_t i = 0; i < 241; i += 20)
    CHECK(std::abs(one.field.values[i] - std::norm(packet_eval(s.packet(0), one.field.axes[0].at(i), 0.0))) < 1e-6);
  CHECK(integrate_field(one.field) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integration order does not matter") {
  const WavegroupState s(overlapping());
  const Quadrature q{1e-8, 40};
  const GridAxisSpec ax{Coord::x1, -8.0, 4.0, 25};
  const MarginalResult a = marginal_over_mirror_and_p2(s, 0.0, ax, q, IntegrationOrder::mirror_first);
  const MarginalResult b = marginal_over_mirror_and_p2(s, 0.0, ax, q, IntegrationOrder::particle2_first);
  for (std::size_t i = 0; i < a.field.cells(); ++i) CHECK(std::abs(a.field.values[i] - b.field.values[i]) < 2 * q.abs_tol);
}

TEST_CASE("marginal mass equals the joint norm") {
  const WavegroupState s(overlapping());
  const double tol = 1e-6;
  const double joint = norm(s, 0.0, tol);
  const auto box = s.envelope_box(0.0, 8.0);
  // Fine x1 grid so that the outer Simpson sum adds nothing measurable
  const MarginalResult m = marginal_over_mirror_and_p2(s, 0.0, {Coord::x1, box.lo[0], box.hi[0], 1201},
                                                       Quadrature{tol / (box.hi[0] - box.lo[0]), 40});
  CHECK(std::abs(integrate_field(m.field) - joint) < 3 * tol);
}

TEST_CASE("halving the tolerance stays inside the coarse error") {
  const WavegroupState s(overlapping());
  GridSpec g;
  g.axes = {{Coord::x1, -5.0, 1.0, 13}, {Coord::x2, -1.0, 5.0, 13}};
  const MarginalResult coarse = marginal_over_mirror(s, 0.0, g, Quadrature{1e-6, 40});
  const MarginalResult fine = marginal_over_mirror(s, 0.0, g, Quadrature{5e-7, 40});
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.field.cells(); ++i)
    worst = std::max(worst, std::abs(coarse.field.values[i] - fine.field.values[i]));
  CHECK(worst <= coarse.max_error);
}

TEST_CASE("mirror axis cannot be swept") {
  const WavegroupState s(overlapping());
  GridSpec g;
  g.axes = {{Coord::X, -1.0, 1.0, 3}};
  CHECK_THROWS_AS(marginal_over_mirror(s, 0.0, g, Quadrature{}), ConfigError);
}

TEST_CASE("phase samples follow alpha beta") {
  const SystemConfig c = overlapping();
  Field f;
  f.axes = {{"x1", -2.0, -1.0, 3}, {"x2", 1.0, 2.0, 2}};
  f.allocate();
  const auto ps = phase_samples(c, f, 0.0);
  REQUIRE(ps.size() == 6);
  const PhasePair want = alpha_beta(c, Vec3(-1.5, 0.0, 2.0));
  CHECK(ps[3].alpha == doctest::Approx(want.alpha));
  CHECK(ps[3].beta == doctest::Approx(want.beta));
}

TEST_CASE("sample integration") {
  std::vector<double> v(101);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(0.01 * double(i), 3);
  CHECK(integrate_samples(v, 0.01) == doctest::Approx(0.25).epsilon(1e-12));
}
