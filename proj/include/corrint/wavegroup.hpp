#pragma once

#include <array>
#include <complex>
#include <vector>

#include "corrint/eigenstate.hpp"
#include "corrint/field.hpp"
#include "corrint/quadrature.hpp"

namespace corrint {

struct GaussianPacket1D {
  double mass = 1.0;
  double kbar = 0.0;
  double x0 = 0.0;
  double sigma_x = 1.0;
};

std::complex<double> packet_eval(const GaussianPacket1D& p, double y, double t, double hbar = 1.0);

// Width of |phi(., t)|^2.
double packet_width(const GaussianPacket1D& p, double t, double hbar = 1.0);

// One packet frozen at time t: log phi(y) = log_norm - (y - c)^2 q + i (k y + phase).
struct PacketAtTime {
  std::complex<double> log_norm;
  std::complex<double> q;
  double center = 0.0;
  double k = 0.0;
  double phase = 0.0;

  PacketAtTime(const GaussianPacket1D& p, double t, double hbar);
  std::complex<double> log_eval(double y) const {
    const double d = y - center;
    return log_norm - d * d * q + std::complex<double>(0.0, k * y + phase);
  }
};

class WavegroupState {
 public:
  // Converts to natural units if needed.
  explicit WavegroupState(const SystemConfig& config);

  const SystemConfig& config() const { return config_; }
  int bodies() const { return config_.bodies; }
  const GaussianPacket1D& packet(int body) const { return packets_[body]; }
  // Transpose of the wavevector map: path term coordinates are y = map * x.
  const Mat3& coordinate_map(PathId p) const { return coord_maps_[index(p)]; }
  double amplitude_weight(PathId p) const { return config_.amplitudes[index(p)]; }
  const std::vector<PathId>& active_paths() const { return active_; }
  std::uint64_t config_hash() const { return hash_; }

  // Unweighted product term of path p.
  std::complex<double> path_term(PathId p, const Vec3& x, double t) const;
  Amplitude amplitude(const Vec3& x, double t) const;
  double pdf(const Vec3& x, double t) const { return std::norm(amplitude(x, t).value); }

  // Gaussian density of path p's term: mean and covariance in x.
  Vec3 path_center(PathId p, double t) const;
  Mat3 path_covariance(PathId p, double t) const;

  struct Box {
    Vec3 lo;
    Vec3 hi;
  };
  // Union over active paths of mean +- nsigma std along each axis.
  Box envelope_box(double t, double nsigma = 8.0) const;
  // Smallest conditional std along `axis` over active paths.
  double min_conditional_width(double t, int axis) const;

  // Fraction of the incident term's norm lying outside the ordered domain.
  double incident_leakage(double t) const;

 private:
  SystemConfig config_;
  std::array<GaussianPacket1D, 3> packets_;
  std::array<Mat3, 5> coord_maps_;
  std::array<Mat3, 5> inverse_maps_;
  std::vector<PathId> active_;
  std::uint64_t hash_ = 0;
};

Amplitude wavegroup_amplitude(const WavegroupState& s, const Vec3& x, double t);

struct GridAxisSpec {
  Coord coord = Coord::x1;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 1;
};

struct GridSpec {
  std::vector<GridAxisSpec> axes;   // 1-3 swept coordinates, first varies slowest
  Vec3 fixed = Vec3::Zero();        // values of coordinates not swept
  bool mask_outside_domain = true;  // out-of-domain cells set to 0
  std::size_t cell_cap = std::size_t{1} << 28;
};

// Throws ConfigError on malformed specs or when over the cell cap; the
// sampling-floor check only produces warnings.
void check_grid(const GridSpec& g, std::size_t& cells);
std::vector<std::string> sampling_warnings(const SystemConfig& c, const GridSpec& g);

Field sample_grid(const WavegroupState& s, const GridSpec& g, double t, int threads = 0);

// PDF along x(s) = origin + s * direction, s in [s_min, s_max].
Field sample_line(const WavegroupState& s, const Vec3& origin, const Vec3& direction,
                  const Axis& param, double t, bool mask_outside_domain = true);

// Integral of the PDF over the ordered domain inside the 8-sigma envelope box.
QuadResult norm_integral(const WavegroupState& s, double t, double tol);
double norm(const WavegroupState& s, double t, double tol);

}  // namespace corrint
