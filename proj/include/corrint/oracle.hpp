#pragma once

#include <complex>
#include <span>
#include <vector>

#include "corrint/field.hpp"
#include "corrint/kinematics.hpp"

// Brute-force split-step evolution used to check the closed-form wavegroups.
namespace corrint::oracle {

// Periodic axis: x_i = min + i * (max - min) / n, i < n.
struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  double dx() const { return (max - min) / static_cast<double>(n); }
  double at(std::size_t i) const { return min + dx() * static_cast<double>(i); }
};

struct GridSpec2D {
  GridAxis x1;
  GridAxis X;
  double dt = 0.0;
  std::size_t steps = 0;  // derived from the last snapshot when 0
};

struct GridSpec3D {
  GridAxis x1;
  GridAxis X;
  GridAxis x2;
  double dt = 0.0;
  std::size_t steps = 0;
};

// V(u) = V0 exp(-u^2 / (2 w^2)) on each contact coordinate; V0 = 0 turns it off.
struct BarrierModel {
  double V0 = 0.0;
  double w = 0.0;
  // false skips the delta-likeness bounds (soft potentials for splitting checks)
  bool stiff = true;
};

struct Options {
  double t_start = 0.0;
  std::vector<double> snapshot_times;
  bool absorbing = false;        // smooth edge mask instead of pure periodic wrap
  double absorb_fraction = 0.1;  // border width per side, as a fraction of the extent
  bool keep_wavefunction = false;
  std::size_t memory_cap_bytes = std::size_t{4} << 30;
  int threads = 1;
};

struct Snapshot {
  double t = 0.0;
  Field pdf;                                     // |psi|^2 on the grid
  std::vector<std::complex<double>> psi;         // kept on request
  double norm = 0.0;
  double absorbed = 0.0;                         // mass removed by the edge mask so far
  std::vector<double> mean_velocity;             // per axis, from momentum space
  double kinetic = 0.0;
  double potential = 0.0;
  double energy() const { return kinetic + potential; }
};

// Throw ConfigError naming the violated bound.
void validate(const SystemConfig& c, const GridSpec2D& g, const BarrierModel& b, const Options& o);
void validate(const SystemConfig& c, const GridSpec3D& g, const BarrierModel& b, const Options& o);

// Initial state: product of the config's free packets at o.t_start.
std::vector<Snapshot> evolve_2body(const SystemConfig& c, const GridSpec2D& g, const BarrierModel& b,
                                   const Options& o);
std::vector<Snapshot> evolve_3body(const SystemConfig& c, const GridSpec3D& g, const BarrierModel& b,
                                   const Options& o);

// Default stiff barrier: V0 = 1000 x incident kinetic energy, w = dx / 4.
BarrierModel default_barrier(const SystemConfig& c, double dx);

// Analytic field on the oracle's grid points (same Field axes).
Field analytic_on_grid(const SystemConfig& c, const GridSpec2D& g, double t);

struct Comparison {
  double l2_rel = 0.0;
  double period_rel = 0.0;
  bool period_found = false;
};

// Relative L2 difference of unit-mass PDFs and relative fringe-period
// difference along the anti-diagonal through the peak of a (in-domain part).
Comparison compare_fields(const Field& a, const Field& b);

// |<a|b>|^2 / (<a|a><b|b>) on the same grid.
double fidelity(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace corrint::oracle
