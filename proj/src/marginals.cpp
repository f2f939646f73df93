#include "corrint/marginals.hpp"

#include <cmath>

#include "corrint/parallel.hpp"

namespace corrint {

namespace {

constexpr std::size_t kPanelCap = 1u << 16;

double panel_width(const WavegroupState& s, double t, int axis) {
  const double period = axis_fringe_spacing(s.config(), static_cast<Coord>(axis));
  return std::min(period / 8.0, 0.5 * s.min_conditional_width(t, axis));
}

std::size_t panels(double len, double width) { return std::min(kPanelCap, panels_for(len, width)); }

void finish(MarginalResult& m, const std::vector<QuadResult>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    m.field.values[i] = cells[i].value;
    m.max_error = std::max(m.max_error, cells[i].error);
    if (!cells[i].converged) m.flagged.push_back(i);
  }
}

}  // namespace

MarginalResult marginal_over_mirror(const WavegroupState& s, double t, const GridSpec& g, const Quadrature& q,
                                    int threads) {
  std::size_t cells = 0;
  check_grid(g, cells);
  for (const auto& a : g.axes)
    if (a.coord == Coord::X) throw ConfigError("grid", "the mirror coordinate is integrated out");
  if (s.bodies() == 2)
    for (const auto& a : g.axes)
      if (a.coord == Coord::x2) throw ConfigError("grid", "two-body state has no x2 axis");

  MarginalResult m;
  Field& f = m.field;
  bool swept[3] = {false, false, false};
  for (const auto& a : g.axes) {
    f.axes.push_back(Axis{std::string(coord_name(a.coord)), a.min, a.max, a.n});
    swept[static_cast<int>(a.coord)] = true;
  }
  if (!swept[0]) f.fixed.emplace_back("x1", g.fixed[0]);
  if (s.bodies() == 3 && !swept[2]) f.fixed.emplace_back("x2", g.fixed[2]);
  f.t = t;
  f.config_hash = s.config_hash();
  f.allocate();

  const auto box = s.envelope_box(t, 8.0);
  const double width = panel_width(s, t, 1);
  std::vector<QuadResult> results(cells);
  parallel_for(
      cells,
      [&](std::size_t c) {
        Vec3 x = g.fixed;
        std::size_t rem = c;
        for (std::size_t k = g.axes.size(); k-- > 0;) {
          const std::size_t i = rem % f.axes[k].n;
          rem /= f.axes[k].n;
          x[static_cast<int>(g.axes[k].coord)] = f.axes[k].at(i);
        }
        const double lo = std::max(x[0], box.lo[1]);
        const double hi = s.bodies() == 3 ? std::min(x[2], box.hi[1]) : box.hi[1];
        if (!(hi > lo)) return;
        results[c] = adaptive_simpson(
            [&](double X) { return s.pdf(Vec3(x[0], X, x[2]), t); }, lo, hi, q, panels(hi - lo, width));
      },
      threads);
  finish(m, results);
  return m;
}

MarginalResult marginal_over_mirror_and_p2(const WavegroupState& s, double t, const GridAxisSpec& x1_axis,
                                           const Quadrature& q, IntegrationOrder order, int threads) {
  if (s.bodies() != 3) throw ConfigError("bodies", "needs the three-body state");
  if (x1_axis.coord != Coord::x1) throw ConfigError("grid", "axis must be x1");
  GridSpec g{{x1_axis}, Vec3::Zero(), false};
  std::size_t cells = 0;
  check_grid(g, cells);

  MarginalResult m;
  Field& f = m.field;
  f.axes.push_back(Axis{"x1", x1_axis.min, x1_axis.max, x1_axis.n});
  f.t = t;
  f.config_hash = s.config_hash();
  f.allocate();

  const auto box = s.envelope_box(t, 8.0);
  const double wX = panel_width(s, t, 1), w2 = panel_width(s, t, 2);
  std::vector<QuadResult> results(cells);
  parallel_for(
      cells,
      [&](std::size_t c) {
        const double x1 = f.axes[0].at(c);
        bool ok = true;
        QuadResult r;
        if (order == IntegrationOrder::mirror_first) {
          const double lo = std::max(x1, box.lo[2]), hi = box.hi[2];
          if (!(hi > lo)) return;
          const Quadrature qi{q.abs_tol / (2.0 * (hi - lo)), q.max_depth};
          const Quadrature qo{q.abs_tol / 2.0, q.max_depth};
          r = adaptive_simpson(
              [&](double x2) {
                const double a = std::max(x1, box.lo[1]), b = std::min(x2, box.hi[1]);
                if (!(b > a)) return 0.0;
                auto in = adaptive_simpson([&](double X) { return s.pdf(Vec3(x1, X, x2), t); }, a, b, qi,
                                           panels(b - a, wX));
                ok &= in.converged;
                return in.value;
              },
              lo, hi, qo, panels(hi - lo, w2));
        } else {
          const double lo = std::max(x1, box.lo[1]), hi = box.hi[1];
          if (!(hi > lo)) return;
          const Quadrature qi{q.abs_tol / (2.0 * (hi - lo)), q.max_depth};
          const Quadrature qo{q.abs_tol / 2.0, q.max_depth};
          r = adaptive_simpson(
              [&](double X) {
                const double a = std::max(X, box.lo[2]), b = box.hi[2];
                if (!(b > a)) return 0.0;
                auto in = adaptive_simpson([&](double x2) { return s.pdf(Vec3(x1, X, x2), t); }, a, b, qi,
                                           panels(b - a, w2));
                ok &= in.converged;
                return in.value;
              },
              lo, hi, qo, panels(hi - lo, wX));
        }
        r.converged = r.converged && ok;
        results[c] = r;
      },
      threads);
  finish(m, results);
  return m;
}

std::vector<PhaseSample> phase_samples(const SystemConfig& c, const Field& f, double X0) {
  std::vector<PhaseSample> out;
  out.reserve(f.cells());
  double x1 = 0.0, x2 = 0.0;
  for (const auto& [k, v] : f.fixed) {
    if (k == "x1") x1 = v;
    if (k == "x2") x2 = v;
  }
  const std::size_t n0 = f.axes[0].n, n1 = f.rank() > 1 ? f.axes[1].n : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      double* slot[2] = {&x1, &x2};
      (*slot[f.axes[0].name == "x1" ? 0 : 1]) = f.axes[0].at(i);
      if (f.rank() > 1) (*slot[f.axes[1].name == "x1" ? 0 : 1]) = f.axes[1].at(j);
      const PhasePair ph = alpha_beta(c, Vec3(x1, X0, x2));
      out.push_back({ph.alpha, ph.beta, f.values[i * n1 + j]});
    }
  }
  return out;
}

double integrate_samples(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  // Simpson over an even number of intervals, trapezoid on a leftover one.
  const std::size_t m = (n - 1) % 2 == 0 ? n : n - 1;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 < m; i += 2) s += h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
  if (m != n) s += 0.5 * h * (v[n - 2] + v[n - 1]);
  return s;
}

double integrate_field(const Field& f) {
  if (f.rank() == 1) return integrate_samples(f.values, f.axes[0].step());
  if (f.rank() != 2) throw ConfigError("field", "integration needs a 1D or 2D field");
  std::vector<double> rows(f.axes[0].n);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = integrate_samples(row(f, i), f.axes[1].step());
  return integrate_samples(rows, f.axes[0].step());
}

}  // namespace corrint
