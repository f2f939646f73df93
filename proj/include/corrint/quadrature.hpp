#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace corrint {

struct Quadrature {
  double abs_tol = 1e-8;
  int max_depth = 40;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // sum of per-panel estimates
  bool converged = true;
  std::size_t evaluations = 0;
};

namespace detail {

template <class F>
void simpson_panel(F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth, QuadResult& r) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  r.evaluations += 2;
  const double h = (b - a) / 12.0;
  const double left = h * (fa + 4.0 * flm + fm);
  const double right = h * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol || depth <= 0 || !(m > a && m < b)) {
    if (std::abs(diff) > 15.0 * tol) r.converged = false;
    r.value += left + right + diff / 15.0;
    r.error += std::abs(diff) / 15.0;
    return;
  }
  simpson_panel(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, r);
  simpson_panel(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, r);
}

}  // namespace detail

// Adaptive Simpson on [a, b] starting from `panels` equal panels; the
// tolerance is shared in proportion to panel width.
template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, const Quadrature& q,
                            std::size_t panels = 1) {
  QuadResult r;
  if (!(b > a)) return r;
  panels = std::max<std::size_t>(panels, 1);
  const double w = (b - a) / static_cast<double>(panels);
  double fa = f(a);
  r.evaluations = 1;
  for (std::size_t i = 0; i < panels; ++i) {
    const double pa = a + w * static_cast<double>(i);
    const double pb = i + 1 == panels ? b : a + w * static_cast<double>(i + 1);
    const double pm = 0.5 * (pa + pb);
    const double fm = f(pm), fb = f(pb);
    r.evaluations += 2;
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_panel(f, pa, pb, fa, fm, fb, whole, q.abs_tol / static_cast<double>(panels),
                          q.max_depth, r);
    fa = fb;
  }
  return r;
}

// Panels needed so that each is at most `width` wide.
inline std::size_t panels_for(double length, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) return 1;
  return static_cast<std::size_t>(std::ceil(length / width));
}

}  // namespace corrint
