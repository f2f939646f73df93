#pragma once

#include <vector>

#include "corrint/wavegroup.hpp"

namespace corrint {

struct MarginalResult {
  Field field;
  std::vector<std::size_t> flagged;  // cells whose quadrature hit max_depth
  double max_error = 0.0;            // largest per-cell error estimate
};

// PDF(x1, x2) = integral of PDF(x1, X, x2) dX over (x1, x2) within the mirror
// envelope. Grid axes are x1 and/or x2; a missing one is taken from g.fixed.
MarginalResult marginal_over_mirror(const WavegroupState& s, double t, const GridSpec& g, const Quadrature& q,
                                    int threads = 0);

enum class IntegrationOrder {
  mirror_first,     // inner X, outer x2
  particle2_first,  // inner x2, outer X
};

// PDF(x1) = double integral over X and x2.
MarginalResult marginal_over_mirror_and_p2(const WavegroupState& s, double t, const GridAxisSpec& x1_axis,
                                           const Quadrature& q,
                                           IntegrationOrder order = IntegrationOrder::mirror_first,
                                           int threads = 0);

// (alpha, beta) samples of a field over x1 and/or x2, with X pinned at X0.
std::vector<PhaseSample> phase_samples(const SystemConfig& c, const Field& f, double X0);

// Composite Simpson (trapezoid for even counts' last interval) over a 1D field.
double integrate_samples(const std::vector<double>& v, double step);
// Same for a 2D field, axis by axis.
double integrate_field(const Field& f);

}  // namespace corrint
