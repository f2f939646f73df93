#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "corrint/field.hpp"

namespace corrint {

struct FringeEstimate {
  bool found = false;
  double period = 0.0;
  double peak_ratio = 0.0;   // fringe peak / largest spectral magnitude
  double floor_ratio = 0.0;  // fringe peak / median spectral magnitude
};

// Dominant period from the zero-padded DFT magnitude (mean removed, first
// low-frequency lobe skipped, 3-point quadratic peak interpolation). The
// fringe must repeat min_periods times where the slice exceeds 0.1 x max.
FringeEstimate fringe_period(std::span<const double> slice, double ds, double min_periods = 3.0);

// Fringe contrast over [begin, end) after dividing by a moving-average
// envelope three periods wide. Returns 0 when no period is detectable.
double visibility(std::span<const double> slice, double ds, std::size_t begin, std::size_t end);
double visibility(std::span<const double> slice, double ds);

// 8-connected components of cells >= threshold_frac * max.
struct RidgeLabels {
  std::vector<int> labels;  // 0 = background, 1..count
  int count = 0;
};
RidgeLabels label_ridges(const Field& f, double threshold_frac);
int ridge_count(const Field& f, double threshold_frac);

// Phase of the cross spectrum at the common fringe frequency, in (-pi, pi].
double phase_shift(std::span<const double> a, std::span<const double> b, double ds);

// Longest run of strictly positive samples; used to restrict slices to the
// in-domain part of a masked field.
std::pair<std::size_t, std::size_t> positive_run(std::span<const double> v);

}  // namespace corrint
