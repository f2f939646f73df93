#include "corrint/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

#include "corrint/analysis.hpp"
#include "corrint/parallel.hpp"
#include "corrint/simd.hpp"
#include "corrint/wavegroup.hpp"

namespace corrint::oracle {

namespace {

using cplx = std::complex<double>;

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};
template <class T>
using Buffer = std::unique_ptr<T[], FftwFree<T>>;

template <class T>
Buffer<T> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw NumericalError("oracle: allocation failed", 0.0);
  return Buffer<T>(p);
}

struct Plan {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  Plan(const std::vector<int>& n, cplx* data) {
    std::lock_guard lock(planner_mutex());
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), d, d, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), d, d, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw NumericalError("oracle: FFT planning failed", 0.0);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void forward(cplx* d) const { fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(d), reinterpret_cast<fftw_complex*>(d)); }
  void backward(cplx* d) const { fftw_execute_dft(bwd, reinterpret_cast<fftw_complex*>(d), reinterpret_cast<fftw_complex*>(d)); }
};

const char* axis_label(int d) {
  static const char* names[] = {"x1", "X", "x2"};
  return names[d];
}

Axis field_axis(const GridAxis& g, int d) {
  return Axis{axis_label(d), g.min, g.min + g.dx() * static_cast<double>(g.n - 1), g.n};
}

// Angular wavenumber of FFT bin i.
double bin_k(std::size_t i, const GridAxis& g) {
  const auto n = static_cast<long>(g.n);
  long j = static_cast<long>(i);
  if (j >= (n + 1) / 2) j -= n;
  return 2.0 * M_PI * static_cast<double>(j) / (g.dx() * static_cast<double>(n));
}

double incident_energy(const SystemConfig& c) {
  double e = 0.0;
  for (int j = 0; j < 3; ++j) {
    if (j == 2 && c.bodies == 2) continue;
    const Body& b = c.body(j);
    e += 0.5 * b.mass * b.v0 * b.v0;
  }
  return e;
}

double shortest_fringe(const SystemConfig& c) {
  double f = std::numeric_limits<double>::infinity();
  if (c.particle1.v0 != c.mirror.v0)
    f = std::min(f, fringe_spacing(c.particle1.mass, c.particle1.v0, c.mirror.v0, c.hbar));
  if (c.bodies == 3 && c.particle2.v0 != c.mirror.v0)
    f = std::min(f, fringe_spacing(c.particle2.mass, c.particle2.v0, c.mirror.v0, c.hbar));
  return f;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

SystemConfig natural(const SystemConfig& c) {
  return c.units.mode == UnitMode::natural ? c : to_natural_units(c);
}

void check(const SystemConfig& c0, const std::vector<GridAxis>& axes, double dt, const BarrierModel& b,
           const Options& o) {
  const SystemConfig c = natural(c0);
  const int D = static_cast<int>(axes.size());
  if (c.bodies != D) throw ConfigError("bodies", "oracle rank " + std::to_string(D) + " needs bodies = " + std::to_string(D));
  std::size_t cells = 1;
  for (int d = 0; d < D; ++d) {
    const auto& a = axes[d];
    const std::string name = std::string("grid.") + axis_label(d);
    if (a.n < 2 || (a.n & (a.n - 1)) != 0) throw ConfigError(name + ".n", "must be a power of two >= 2");
    if (!(a.max > a.min)) throw ConfigError(name, "max must exceed min");
    cells *= a.n;
  }
  // The contact barrier lies on grid diagonals only with equal spacing.
  for (int d = 1; d < D; ++d)
    if (std::abs(axes[d].dx() - axes[0].dx()) > 1e-12 * axes[0].dx())
      throw ConfigError(std::string("grid.") + axis_label(d), "spacing must equal the x1 spacing");
  const double dx = axes[0].dx();

  const std::size_t bytes = cells * (4 * sizeof(cplx) + (D + 3) * sizeof(double));
  if (bytes > o.memory_cap_bytes)
    throw ConfigError("grid", "needs " + fmt(bytes / 1048576.0) + " MiB, over the cap of " +
                                  fmt(o.memory_cap_bytes / 1048576.0) + " MiB");

  if (!(dt > 0.0)) throw ConfigError("oracle.dt", "must be positive");
  for (double ts : o.snapshot_times) {
    const double n = (ts - o.t_start) / dt;
    if (n < -1e-9) throw ConfigError("snapshot.t", "snapshot " + fmt(ts) + " precedes t_start");
    if (std::abs(n - std::round(n)) > 1e-6)
      throw ConfigError("snapshot.t", "snapshot " + fmt(ts) + " is not a whole number of steps from t_start");
  }

  // Resolution: wavevectors carried by any active path, central value + 2 spreads.
  const WavegroupState s(c);
  const Vec3 k = wavevectors(c);
  const Vec3 sk(c.particle1.sigma_k(), c.mirror.sigma_k(), c.bodies == 3 ? c.particle2.sigma_k() : 0.0);
  double kmax = 0.0;
  for (PathId p : s.active_paths()) {
    const Mat3 w = path_kinematics(c, p).wavevector_map;
    const Vec3 kp = w * k;
    for (int d = 0; d < D; ++d) {
      double spread = 0.0;
      for (int j = 0; j < D; ++j) spread += w(d, j) * w(d, j) * sk[j] * sk[j];
      kmax = std::max(kmax, std::abs(kp[d]) + 2.0 * std::sqrt(spread));
    }
  }
  if (kmax > 0.0) {
    const double lambda = 2.0 * M_PI / kmax;
    if (dx > lambda / 16.0)
      throw ConfigError("grid", "dx = " + fmt(dx) + " gives fewer than 16 points per shortest wavelength " +
                                    fmt(lambda) + " (need dx <= " + fmt(lambda / 16.0) + ")");
  }

  // Kinetic phase per step at the grid's highest wavenumber.
  double phase = 0.0;
  const double kn = M_PI / dx;
  for (int d = 0; d < D; ++d) phase += c.hbar * kn * kn / (2.0 * c.body(d).mass) * dt;
  if (phase >= M_PI / 4.0)
    throw ConfigError("oracle.dt", "kinetic phase per step " + fmt(phase) + " rad at the grid edge exceeds pi/4");

  if (b.V0 < 0.0) throw ConfigError("barrier.V0", "must be non-negative");
  if (b.V0 > 0.0 && !(b.w > 0.0)) throw ConfigError("barrier.w", "must be positive");
  if (b.V0 > 0.0 && b.stiff) {
    const double e = incident_energy(c);
    if (b.V0 < 1e3 * e * (1.0 - 1e-12))
      throw ConfigError("barrier.V0", "V0 = " + fmt(b.V0) + " is below 1000 x incident kinetic energy " + fmt(e));
    const double f = shortest_fringe(c);
    if (b.w > f / 10.0)
      throw ConfigError("barrier.w", "w = " + fmt(b.w) + " exceeds 1/10 of the fringe spacing " + fmt(f));
  }

  // Initial packets well inside the box.
  double outside = 0.0;
  for (int d = 0; d < D; ++d) {
    const Body& body = c.body(d);
    const GaussianPacket1D p{body.mass, body.kbar(c.hbar), body.x0, body.sigma_x};
    const double ctr = body.x0 + body.v0 * o.t_start;
    const double w = packet_width(p, o.t_start, c.hbar);
    const double lo = axes[d].min, hi = axes[d].min + axes[d].dx() * static_cast<double>(axes[d].n);
    outside += 0.5 * std::erfc((ctr - lo) / (M_SQRT2 * w)) + 0.5 * std::erfc((hi - ctr) / (M_SQRT2 * w));
  }
  if (outside >= 1e-10)
    throw ConfigError("grid", "initial packets put " + fmt(outside) + " of their mass outside the box (limit 1e-10)");
}

std::vector<Snapshot> evolve(const SystemConfig& c0, const std::vector<GridAxis>& axes, double dt,
                             const BarrierModel& b, const Options& o) {
  check(c0, axes, dt, b, o);
  const SystemConfig c = natural(c0);
  const std::uint64_t hash = canonical_hash(c);
  const int D = static_cast<int>(axes.size());
  const auto& K = simd::kernels();

  std::vector<std::size_t> stride(D, 1);
  std::size_t cells = 1;
  for (int d = D - 1; d >= 0; --d) {
    stride[d] = cells;
    cells *= axes[d].n;
  }
  double dvol = 1.0;
  for (const auto& a : axes) dvol *= a.dx();
  auto coord = [&](std::size_t idx, int d) { return (idx / stride[d]) % axes[d].n; };

  auto psi = alloc<cplx>(cells);
  auto scratch = alloc<cplx>(cells);
  auto khalf = alloc<cplx>(cells);
  auto kfull = alloc<cplx>(cells);
  auto pot_phase = alloc<cplx>(cells);
  auto pot = alloc<double>(cells);
  auto tkin = alloc<double>(cells);
  std::vector<Buffer<double>> vel;
  for (int d = 0; d < D; ++d) vel.push_back(alloc<double>(cells));
  Buffer<double> mask;

  std::vector<int> n_int;
  for (const auto& a : axes) n_int.push_back(static_cast<int>(a.n));
  const Plan plan(n_int, psi.get());

  std::vector<PacketAtTime> packets;
  for (int d = 0; d < D; ++d) {
    const Body& body = c.body(d);
    packets.emplace_back(GaussianPacket1D{body.mass, body.kbar(c.hbar), body.x0, body.sigma_x}, o.t_start, c.hbar);
  }
  std::vector<double> mass(D);
  for (int d = 0; d < D; ++d) mass[d] = c.body(d).mass;

  const double inv_n = 1.0 / static_cast<double>(cells);
  parallel_for(cells, [&](std::size_t i) {
    cplx lg = 0.0;
    double e = 0.0;
    double x[3] = {0, 0, 0};
    for (int d = 0; d < D; ++d) {
      const std::size_t j = coord(i, d);
      x[d] = axes[d].at(j);
      lg += packets[d].log_eval(x[d]);
      const double kd = bin_k(j, axes[d]);
      vel[d][i] = c.hbar * kd / mass[d];
      e += c.hbar * c.hbar * kd * kd / (2.0 * mass[d]);
    }
    psi[i] = std::exp(lg);
    tkin[i] = e;
    const double w = e / c.hbar;  // angular frequency
    khalf[i] = std::polar(inv_n, -w * dt / 2.0);
    kfull[i] = std::polar(inv_n, -w * dt);
    double v = 0.0;
    if (b.V0 > 0.0) {
      const double u1 = x[0] - x[1];
      v += b.V0 * std::exp(-u1 * u1 / (2.0 * b.w * b.w));
      if (D == 3) {
        const double u2 = x[1] - x[2];
        v += b.V0 * std::exp(-u2 * u2 / (2.0 * b.w * b.w));
      }
    }
    pot[i] = v;
    pot_phase[i] = std::polar(1.0, -v * dt / c.hbar);
  }, o.threads);

  if (o.absorbing) {
    mask = alloc<double>(cells);
    std::vector<std::vector<double>> m1(D);
    for (int d = 0; d < D; ++d) {
      const std::size_t n = axes[d].n;
      const double width = std::max(1.0, o.absorb_fraction * static_cast<double>(n));
      m1[d].assign(n, 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double edge = std::min(static_cast<double>(j), static_cast<double>(n - 1 - j));
        if (edge < width) m1[d][j] = std::pow(std::cos(0.5 * M_PI * (width - edge) / width), 0.125);
      }
    }
    for (std::size_t i = 0; i < cells; ++i) {
      double m = 1.0;
      for (int d = 0; d < D; ++d) m *= m1[d][coord(i, d)];
      mask[i] = m;
    }
  }

  double absorbed = 0.0;
  auto apply_mask = [&] {
    if (!o.absorbing) return;
    const double before = K.abs2_sum(psi.get(), cells);
    for (std::size_t i = 0; i < cells; ++i) psi[i] *= mask[i];
    absorbed += (before - K.abs2_sum(psi.get(), cells)) * dvol;
  };

  // Strang splitting; consecutive kinetic half steps are merged.
  auto advance = [&](std::size_t steps) {
    if (steps == 0) return;
    plan.forward(psi.get());
    K.cmul_inplace(psi.get(), khalf.get(), cells);
    plan.backward(psi.get());
    for (std::size_t s = 0; s < steps; ++s) {
      K.cmul_inplace(psi.get(), pot_phase.get(), cells);
      plan.forward(psi.get());
      K.cmul_inplace(psi.get(), s + 1 < steps ? kfull.get() : khalf.get(), cells);
      plan.backward(psi.get());
      apply_mask();
    }
  };

  auto snapshot = [&](double t) {
    Snapshot snap;
    snap.t = t;
    snap.pdf.t = t;
    snap.pdf.config_hash = hash;
    for (int d = 0; d < D; ++d) snap.pdf.axes.push_back(field_axis(axes[d], d));
    snap.pdf.allocate();
    K.abs2(psi.get(), snap.pdf.values.data(), cells);
    const double sum = K.abs2_sum(psi.get(), cells);
    snap.norm = sum * dvol;
    snap.absorbed = absorbed;
    snap.potential = sum > 0.0 ? K.weighted_abs2_sum(psi.get(), pot.get(), cells) / sum : 0.0;
    std::copy(psi.get(), psi.get() + cells, scratch.get());
    plan.forward(scratch.get());
    const double ksum = K.abs2_sum(scratch.get(), cells);
    for (int d = 0; d < D; ++d)
      snap.mean_velocity.push_back(ksum > 0.0 ? K.weighted_abs2_sum(scratch.get(), vel[d].get(), cells) / ksum : 0.0);
    snap.kinetic = ksum > 0.0 ? K.weighted_abs2_sum(scratch.get(), tkin.get(), cells) / ksum : 0.0;
    if (o.keep_wavefunction) snap.psi.assign(psi.get(), psi.get() + cells);
    return snap;
  };

  std::vector<double> times = o.snapshot_times;
  std::sort(times.begin(), times.end());
  std::vector<Snapshot> out;
  std::size_t done = 0;
  for (double ts : times) {
    const auto target = static_cast<std::size_t>(std::llround((ts - o.t_start) / dt));
    advance(target - done);
    done = target;
    out.push_back(snapshot(o.t_start + static_cast<double>(done) * dt));
    for (double v : out.back().pdf.values)
      if (!std::isfinite(v)) throw NumericalError("oracle: non-finite wavefunction", 0.0);
  }
  return out;
}

}  // namespace

void validate(const SystemConfig& c, const GridSpec2D& g, const BarrierModel& b, const Options& o) {
  check(c, {g.x1, g.X}, g.dt, b, o);
}

void validate(const SystemConfig& c, const GridSpec3D& g, const BarrierModel& b, const Options& o) {
  check(c, {g.x1, g.X, g.x2}, g.dt, b, o);
}

std::vector<Snapshot> evolve_2body(const SystemConfig& c, const GridSpec2D& g, const BarrierModel& b,
                                   const Options& o) {
  return evolve(c, {g.x1, g.X}, g.dt, b, o);
}

std::vector<Snapshot> evolve_3body(const SystemConfig& c, const GridSpec3D& g, const BarrierModel& b,
                                   const Options& o) {
  return evolve(c, {g.x1, g.X, g.x2}, g.dt, b, o);
}

BarrierModel default_barrier(const SystemConfig& c, double dx) {
  return BarrierModel{1e3 * incident_energy(natural(c)), dx / 4.0};
}

Field analytic_on_grid(const SystemConfig& c, const GridSpec2D& g, double t) {
  const WavegroupState s(c);
  GridSpec spec;
  const Axis a1 = field_axis(g.x1, 0), a2 = field_axis(g.X, 1);
  spec.axes = {GridAxisSpec{Coord::x1, a1.min, a1.max, a1.n}, GridAxisSpec{Coord::X, a2.min, a2.max, a2.n}};
  spec.mask_outside_domain = true;
  return sample_grid(s, spec, t);
}

Comparison compare_fields(const Field& a, const Field& b) {
  if (a.rank() != 2 || !same_grid(a, b)) throw ConfigError("field", "compare_fields needs two 2D fields on the same grid");
  if (a.axes[0].name != "x1" || a.axes[1].name != "X")
    throw ConfigError("field", "compare_fields expects (x1, X) axes");
  const std::size_t n0 = a.axes[0].n, n1 = a.axes[1].n;
  Field ma = a, mb = b;
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      if (!(a.axes[0].at(i) < a.axes[1].at(j))) {
        ma.at(i, j) = 0.0;
        mb.at(i, j) = 0.0;
      }
      sa += ma.at(i, j);
      sb += mb.at(i, j);
    }
  if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("compare_fields: no in-domain mass", 0.0);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ma.values.size(); ++i) {
    const double pa = ma.values[i] / sa, pb = mb.values[i] / sb;
    num += (pa - pb) * (pa - pb);
    den += pa * pa;
  }
  Comparison r;
  r.l2_rel = std::sqrt(num / den);

  // Anti-diagonal through the peak of a (fringes run along x1 - X).
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(ma.values.begin(), ma.values.end()) - ma.values.begin());
  const std::size_t pi = peak / n1, pj = peak % n1;
  const std::size_t back = std::min(pi, n1 - 1 - pj), fwd = std::min(n0 - 1 - pi, pj);
  std::vector<double> da, db;
  for (std::size_t k = pi - back, l = pj + back;; ++k, --l) {
    da.push_back(ma.at(k, l));
    db.push_back(mb.at(k, l));
    if (k == pi + fwd) break;
  }
  auto [lo, hi] = positive_run(da);
  // Trim the far tail so the taper sits on the fringes, not on empty space.
  const double top = *std::max_element(da.begin() + lo, da.begin() + hi);
  while (lo < hi && da[lo] < 1e-3 * top) ++lo;
  while (hi > lo && da[hi - 1] < 1e-3 * top) --hi;
  const double ds = std::hypot(a.axes[0].step(), a.axes[1].step());
  if (hi > lo + 8) {
    const std::span<const double> sa_(da.data() + lo, hi - lo), sb_(db.data() + lo, hi - lo);
    // The overlap fringes only live next to the contact line and decay fast
    // into the domain, so two repeats is all a snapshot can offer here.
    const auto fa = fringe_period(sa_, ds, 2.0), fb = fringe_period(sb_, ds, 2.0);
    if (fa.found && fb.found) {
      r.period_found = true;
      r.period_rel = std::abs(fa.period - fb.period) / fa.period;
    }
  }
  return r;
}

double fidelity(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw ConfigError("field", "fidelity needs equal sizes");
  std::complex<double> ab = 0.0;
  double aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += std::conj(a[i]) * b[i];
    aa += std::norm(a[i]);
    bb += std::norm(b[i]);
  }
  if (!(aa > 0.0) || !(bb > 0.0)) return 0.0;
  return std::norm(ab) / (aa * bb);
}

}  // namespace corrint::oracle
