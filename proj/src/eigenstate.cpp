#include "corrint/eigenstate.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace corrint {

Amplitude eigenstate_amplitude(const SystemConfig& c, const Vec3& kappa, const Vec3& x, double t) {
  const int nb = c.bodies;
  Vec3 k = kappa;
  if (nb == 2) k[2] = 0.0;
  const double w = omega(c, k);
  std::complex<double> sum = 0.0;
  for (PathId p : kAllPaths) {
    const double a = c.amplitudes[index(p)];
    if (a == 0.0) continue;
    const Vec3 kp = path_kinematics(c, p).wavevector_map * k;
    double phase = -w * t;
    for (int j = 0; j < nb; ++j) phase += kp[j] * x[j];
    sum += a * std::polar(1.0, phase);
  }
  return {sum, in_domain(c, {x[0], x[1], x[2]})};
}

double boundary_residual(const SystemConfig& c, const Vec3& kappa, double X, double x2, double t) {
  return std::abs(eigenstate_amplitude(c, kappa, Vec3(X, X, x2), t).value);
}

PhasePair alpha_beta(const SystemConfig& c, const Vec3& x) {
  const double V = c.mirror.v0;
  return {2.0 * c.particle1.mass * (V - c.particle1.v0) * (x[0] - x[1]) / c.hbar,
          2.0 * c.particle2.mass * (V - c.particle2.v0) * (x[1] - x[2]) / c.hbar};
}

double pdf_closed_form(ClosedForm kind, PhasePair phi) {
  const double a = phi.alpha, b = phi.beta;
  switch (kind) {
    case ClosedForm::eq1:
    case ClosedForm::eq3_marginal:
      return 1.5 - std::cos(a) + 0.5 * std::cos(a + b) - std::cos(b);
    case ClosedForm::eq2_classical: return 2.0 - std::cos(a) - std::cos(b);
    case ClosedForm::one_body: return 1.0 - std::cos(a);
  }
  return 0.0;
}

namespace {

std::vector<std::string> basis_names(FitBasis basis) {
  std::vector<std::string> n{"1", "cos(a)", "cos(b)", "cos(a+b)", "cos(a-b)"};
  if (basis == FitBasis::full)
    for (const char* s : {"sin(a)", "sin(b)", "sin(a+b)", "sin(a-b)"}) n.emplace_back(s);
  return n;
}

void basis_row(double a, double b, FitBasis basis, double* r) {
  r[0] = 1.0;
  r[1] = std::cos(a);
  r[2] = std::cos(b);
  r[3] = std::cos(a + b);
  r[4] = std::cos(a - b);
  if (basis == FitBasis::full) {
    r[5] = std::sin(a);
    r[6] = std::sin(b);
    r[7] = std::sin(a + b);
    r[8] = std::sin(a - b);
  }
}

}  // namespace

CoefficientFit coefficient_fit(std::span<const PhaseSample> samples, FitBasis basis) {
  const auto names = basis_names(basis);
  const Eigen::Index nc = static_cast<Eigen::Index>(names.size());
  const Eigen::Index ns = static_cast<Eigen::Index>(samples.size());
  if (ns < nc) throw ConfigError("samples", "fewer samples than basis functions");

  auto span_of = [&](auto get) {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                              [&](const auto& p, const auto& q) { return get(p) < get(q); });
    return get(*hi) - get(*lo);
  };
  const double full = 4.0 * M_PI * (1.0 - 1e-9);
  if (span_of([](const PhaseSample& s) { return s.alpha; }) < full ||
      span_of([](const PhaseSample& s) { return s.beta; }) < full)
    throw ConfigError("samples", "need at least two full periods in each phase");

  Eigen::MatrixXd A(ns, nc);
  Eigen::VectorXd y(ns);
  double row[9];
  for (Eigen::Index i = 0; i < ns; ++i) {
    basis_row(samples[i].alpha, samples[i].beta, basis, row);
    for (Eigen::Index j = 0; j < nc; ++j) A(i, j) = row[j];
    y[i] = samples[i].value;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < nc) throw NumericalError("coefficient_fit: sampling is rank deficient");
  const Eigen::VectorXd coef = qr.solve(y);
  const Eigen::VectorXd res = A * coef - y;

  CoefficientFit fit;
  fit.basis = basis;
  fit.names = names;
  fit.coefficients.assign(coef.data(), coef.data() + nc);
  fit.residual_norm = res.norm();
  fit.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(ns));
  const double yn = y.norm();
  fit.relative_residual = yn > 0.0 ? fit.residual_norm / yn : fit.residual_norm;
  return fit;
}

std::vector<double> eq1_reference(FitBasis basis) {
  std::vector<double> r{1.5, -1.0, -1.0, 0.5, 0.0};
  if (basis == FitBasis::full) r.insert(r.end(), 4, 0.0);
  return r;
}

std::string fit_report(const CoefficientFit& fit) {
  const auto ref = eq1_reference(fit.basis);
  // Overall scale is arbitrary (envelopes, normalization); also show the fit
  // rescaled so its constant term equals eq1's.
  const double scale = fit.coefficients[0] != 0.0 ? ref[0] / fit.coefficients[0] : 0.0;
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %16s %14s %14s\n", "term", "fitted", "rescaled", "eq1");
  os << buf;
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-10s %16.9e %14.8f %14.8f\n", fit.names[i].c_str(), fit.coefficients[i],
                  scale * fit.coefficients[i], ref[i]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "residual rms %.3e (relative %.3e)\n", fit.residual_rms,
                fit.relative_residual);
  os << buf;
  return os.str();
}

}  // namespace corrint
