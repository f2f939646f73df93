#include "corrint/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "corrint/model.hpp"

namespace corrint {

namespace {

constexpr std::size_t kPad = 16;
constexpr double kFloorFactor = 5.0;
constexpr double kPeakFraction = 1e-3;
constexpr double kCoreFraction = 0.1;

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> magnitude_spectrum(std::span<const double> f, std::size_t nfft) {
  // Hann taper with the taper-weighted mean removed: a plain mean would leave
  // a rectangular step whose sidelobes look like fringes.
  const std::size_t m = f.size();
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(m));
  double sw = 0.0, sfw = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += w[i];
    sfw += w[i] * f[i];
  }
  const double mean = sfw / sw;
  double* in = fftw_alloc_real(nfft);
  fftw_complex* out = fftw_alloc_complex(nfft / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < nfft; ++i) in[i] = i < m ? (f[i] - mean) * w[i] : 0.0;
  fftw_execute(plan);
  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(out[i][0], out[i][1]);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mag;
}

}  // namespace

FringeEstimate fringe_period(std::span<const double> f, double ds, double min_periods) {
  if (!(ds > 0.0)) throw ConfigError("ds", "sample spacing must be positive");
  FringeEstimate est;
  if (f.size() < 8) return est;
  for (double v : f)
    if (!std::isfinite(v)) throw NumericalError("fringe_period: non-finite sample");
  const std::size_t nfft = next_pow2(kPad * f.size());
  const std::vector<double> mag = magnitude_spectrum(f, nfft);
  const std::size_t n = mag.size();
  const double top = *std::max_element(mag.begin(), mag.end());
  if (!(top > 0.0)) return est;

  // Skip the first lobe: up to its crest, then down to its trough.
  std::size_t i = 1;
  while (i + 1 < n && mag[i + 1] >= mag[i]) ++i;
  while (i + 1 < n && mag[i + 1] < mag[i]) ++i;
  // A fringe must repeat at least min_periods times inside the signal's core
  // (samples above a tenth of the maximum); slower structure is envelope.
  const double fmax = *std::max_element(f.begin(), f.end());
  const auto in_core = [&](double v) { return v >= kCoreFraction * fmax; };
  const auto first = static_cast<std::size_t>(std::find_if(f.begin(), f.end(), in_core) - f.begin());
  const auto last = f.size() - 1 - static_cast<std::size_t>(std::find_if(f.rbegin(), f.rend(), in_core) - f.rbegin());
  const double core = first < f.size() ? static_cast<double>(last - first + 1) : static_cast<double>(f.size());
  const auto min_bin = static_cast<std::size_t>(std::ceil(min_periods * static_cast<double>(nfft) / core));
  i = std::max(i, min_bin);
  if (i + 1 >= n) return est;
  const std::size_t j = static_cast<std::size_t>(std::max_element(mag.begin() + i, mag.end()) - mag.begin());
  // Rising into the search window is envelope leakage, not a peak.
  if (j == i && j > 0 && mag[j - 1] >= mag[j]) return est;

  std::vector<double> sorted(mag.begin() + 1, mag.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  est.peak_ratio = mag[j] / top;
  est.floor_ratio = median > 0.0 ? mag[j] / median : std::numeric_limits<double>::infinity();
  if (est.floor_ratio < kFloorFactor || est.peak_ratio < kPeakFraction || j == 0 || j + 1 >= n) return est;

  const double a = mag[j - 1], b = mag[j], c = mag[j + 1];
  const double den = a - 2.0 * b + c;
  const double delta = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
  const double bin = static_cast<double>(j) + delta;
  est.found = true;
  est.period = static_cast<double>(nfft) * ds / bin;
  return est;
}

double visibility(std::span<const double> slice, double ds, std::size_t begin, std::size_t end) {
  if (end > slice.size()) end = slice.size();
  if (begin >= end) throw ConfigError("window", "visibility window is empty");
  const std::span<const double> w = slice.subspan(begin, end - begin);
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; }))
    throw NumericalError("visibility: window is all zero");
  const FringeEstimate est = fringe_period(w, ds);
  if (!est.found) return 0.0;

  const std::size_t half = static_cast<std::size_t>(std::llround(1.5 * est.period / ds));
  const std::size_t width = 2 * half + 1;
  double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
  if (w.size() < width) {
    const auto [mn, mx] = std::minmax_element(w.begin(), w.end());
    lo = *mn;
    hi = *mx;
  } else {
    std::vector<double> prefix(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) prefix[i + 1] = prefix[i] + w[i];
    std::vector<double> env(w.size(), 0.0);
    double env_max = 0.0;
    for (std::size_t i = half; i + half < w.size(); ++i) {
      env[i] = (prefix[i + half + 1] - prefix[i - half]) / static_cast<double>(width);
      env_max = std::max(env_max, env[i]);
    }
    // Only where the envelope is bright enough for the ratio to mean anything.
    for (std::size_t i = half; i + half < w.size(); ++i) {
      if (env[i] < 0.1 * env_max || !(env[i] > 0.0)) continue;
      const double r = w[i] / env[i];
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  }
  if (!(hi + lo > 0.0)) return 0.0;
  return std::clamp((hi - lo) / (hi + lo), 0.0, 1.0);
}

double visibility(std::span<const double> slice, double ds) { return visibility(slice, ds, 0, slice.size()); }

RidgeLabels label_ridges(const Field& f, double threshold_frac) {
  if (f.rank() != 2 || f.values.empty()) throw ConfigError("field", "ridge_count needs a non-empty 2D field");
  if (!(threshold_frac > 0.0 && threshold_frac < 1.0))
    throw ConfigError("threshold", "must lie strictly between 0 and 1");
  const std::size_t n0 = f.axes[0].n, n1 = f.axes[1].n;
  RidgeLabels r;
  r.labels.assign(n0 * n1, 0);
  const double top = *std::max_element(f.values.begin(), f.values.end());
  if (!(top > 0.0)) return r;
  const double thr = threshold_frac * top;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n0 * n1; ++start) {
    if (r.labels[start] || f.values[start] < thr) continue;
    const int id = ++r.count;
    r.labels[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const long i = static_cast<long>(c / n1), j = static_cast<long>(c % n1);
      for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          const long a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= static_cast<long>(n0) || b >= static_cast<long>(n1)) continue;
          const std::size_t k = static_cast<std::size_t>(a) * n1 + static_cast<std::size_t>(b);
          if (r.labels[k] || f.values[k] < thr) continue;
          r.labels[k] = id;
          stack.push_back(k);
        }
      }
    }
  }
  return r;
}

int ridge_count(const Field& f, double threshold_frac) { return label_ridges(f, threshold_frac).count; }

double phase_shift(std::span<const double> a, std::span<const double> b, double ds) {
  if (a.size() != b.size()) throw ConfigError("slice", "phase_shift needs slices on the same grid");
  const FringeEstimate ea = fringe_period(a, ds), eb = fringe_period(b, ds);
  if (!ea.found || !eb.found) throw NumericalError("phase_shift: no detectable fringe period");
  const double mean_p = 0.5 * (ea.period + eb.period);
  if (std::abs(ea.period - eb.period) > 0.02 * mean_p)
    throw NumericalError("phase_shift: fringe periods differ by more than 2%");
  const double freq = 1.0 / mean_p;
  auto coeff = [&](std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (v[i] - mean) * std::polar(1.0, -2.0 * M_PI * freq * ds * static_cast<double>(i));
    return s;
  };
  double ph = std::arg(coeff(b) * std::conj(coeff(a)));
  if (ph <= -M_PI) ph = M_PI;
  return ph;
}

std::pair<std::size_t, std::size_t> positive_run(std::span<const double> v) {
  std::size_t best_b = 0, best_e = 0, b = 0;
  for (std::size_t i = 0; i <= v.size(); ++i) {
    if (i < v.size() && v[i] > 0.0) continue;
    if (i - b > best_e - best_b) {
      best_b = b;
      best_e = i;
    }
    b = i + 1;
  }
  return {best_b, best_e};
}

}  // namespace corrint
