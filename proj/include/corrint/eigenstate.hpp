#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "corrint/kinematics.hpp"

namespace corrint {

struct Amplitude {
  std::complex<double> value;
  bool in_domain = true;
};

// Five-path plane-wave superposition at wavevector triple kappa.
Amplitude eigenstate_amplitude(const SystemConfig& c, const Vec3& kappa, const Vec3& x, double t);

// |amplitude| on the contact line x1 = X. Nonzero because the path that would
// pair with P4 is the omitted simultaneous collision.
double boundary_residual(const SystemConfig& c, const Vec3& kappa, double X, double x2, double t);

struct PhasePair {
  double alpha = 0.0;
  double beta = 0.0;
};

PhasePair alpha_beta(const SystemConfig& c, const Vec3& x);

enum class ClosedForm { eq1, eq2_classical, eq3_marginal, one_body };
double pdf_closed_form(ClosedForm kind, PhasePair phi);

enum class FitBasis {
  full,    // 1, cos a, cos b, cos(a+b), cos(a-b), sin a, sin b, sin(a+b), sin(a-b)
  cosine,  // first five of the above
};

struct PhaseSample {
  double alpha;
  double beta;
  double value;
};

struct CoefficientFit {
  FitBasis basis = FitBasis::full;
  std::vector<std::string> names;
  std::vector<double> coefficients;
  double residual_norm = 0.0;   // ||A c - y||
  double residual_rms = 0.0;
  double relative_residual = 0.0;  // ||A c - y|| / ||y||
};

CoefficientFit coefficient_fit(std::span<const PhaseSample> samples, FitBasis basis = FitBasis::full);

// Coefficients of the closed form eq1 on the same basis.
std::vector<double> eq1_reference(FitBasis basis);
// Side-by-side table of fitted vs eq1 coefficients.
std::string fit_report(const CoefficientFit& fit);

}  // namespace corrint
