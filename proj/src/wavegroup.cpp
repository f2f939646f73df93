#include "corrint/wavegroup.hpp"

#include <cmath>
#include <sstream>

#include "corrint/parallel.hpp"
#include "corrint/simd.hpp"

namespace corrint {

using cplx = std::complex<double>;

PacketAtTime::PacketAtTime(const GaussianPacket1D& p, double t, double hbar) {
  const double s2 = p.sigma_x * p.sigma_x;
  const cplx a(1.0, hbar * t / (2.0 * p.mass * s2));
  log_norm = -0.25 * std::log(2.0 * M_PI * s2) - 0.5 * std::log(a);
  q = 1.0 / (4.0 * s2 * a);
  const double vbar = hbar * p.kbar / p.mass;
  center = p.x0 + vbar * t;
  k = p.kbar;
  phase = -p.kbar * p.x0 - hbar * p.kbar * p.kbar * t / (2.0 * p.mass);
}

cplx packet_eval(const GaussianPacket1D& p, double y, double t, double hbar) {
  return std::exp(PacketAtTime(p, t, hbar).log_eval(y));
}

double packet_width(const GaussianPacket1D& p, double t, double hbar) {
  const double r = hbar * t / (2.0 * p.mass * p.sigma_x * p.sigma_x);
  return p.sigma_x * std::sqrt(1.0 + r * r);
}

WavegroupState::WavegroupState(const SystemConfig& config) : config_(to_natural_units(config)) {
  hash_ = canonical_hash(config_);
  for (int j = 0; j < 3; ++j) {
    const Body& b = config_.body(j);
    packets_[j] = GaussianPacket1D{b.mass, b.kbar(config_.hbar), b.x0, b.sigma_x};
  }
  for (PathId p : kAllPaths) {
    const Mat3 w = path_kinematics(config_, p).wavevector_map;
    coord_maps_[index(p)] = w.transpose();
    inverse_maps_[index(p)] = w.transpose().inverse();
    if (config_.amplitudes[index(p)] != 0.0) active_.push_back(p);
  }
}

cplx WavegroupState::path_term(PathId p, const Vec3& x, double t) const {
  const Vec3 y = coord_maps_[index(p)] * x;
  cplx s = 0.0;
  for (int j = 0; j < bodies(); ++j) s += PacketAtTime(packets_[j], t, config_.hbar).log_eval(y[j]);
  return std::exp(s);
}

Amplitude WavegroupState::amplitude(const Vec3& x, double t) const {
  std::array<PacketAtTime, 3> pk{PacketAtTime(packets_[0], t, config_.hbar),
                                 PacketAtTime(packets_[1], t, config_.hbar),
                                 PacketAtTime(packets_[2], t, config_.hbar)};
  cplx sum = 0.0;
  for (PathId p : active_) {
    const Vec3 y = coord_maps_[index(p)] * x;
    cplx s = 0.0;
    for (int j = 0; j < bodies(); ++j) s += pk[j].log_eval(y[j]);
    sum += config_.amplitudes[index(p)] * std::exp(s);
  }
  return {sum, in_domain(config_, {x[0], x[1], x[2]})};
}

Amplitude wavegroup_amplitude(const WavegroupState& s, const Vec3& x, double t) {
  return s.amplitude(x, t);
}

Vec3 WavegroupState::path_center(PathId p, double t) const {
  Vec3 c;
  for (int j = 0; j < 3; ++j) c[j] = PacketAtTime(packets_[j], t, config_.hbar).center;
  return inverse_maps_[index(p)] * c;
}

Mat3 WavegroupState::path_covariance(PathId p, double t) const {
  Vec3 var;
  for (int j = 0; j < 3; ++j) {
    const double w = packet_width(packets_[j], t, config_.hbar);
    var[j] = w * w;
  }
  const Mat3& a = inverse_maps_[index(p)];
  return a * var.asDiagonal() * a.transpose();
}

WavegroupState::Box WavegroupState::envelope_box(double t, double nsigma) const {
  Box b;
  b.lo.setConstant(std::numeric_limits<double>::infinity());
  b.hi.setConstant(-std::numeric_limits<double>::infinity());
  for (PathId p : active_) {
    const Vec3 c = path_center(p, t);
    const Mat3 cov = path_covariance(p, t);
    for (int j = 0; j < 3; ++j) {
      const double h = nsigma * std::sqrt(cov(j, j));
      b.lo[j] = std::min(b.lo[j], c[j] - h);
      b.hi[j] = std::max(b.hi[j], c[j] + h);
    }
  }
  if (bodies() == 2) b.lo[2] = b.hi[2] = 0.0;
  return b;
}

double WavegroupState::min_conditional_width(double t, int axis) const {
  double w = std::numeric_limits<double>::infinity();
  const int nb = bodies();
  for (PathId p : active_) {
    const Mat3 cov = path_covariance(p, t);
    const Eigen::MatrixXd prec = cov.topLeftCorner(nb, nb).inverse();
    w = std::min(w, 1.0 / std::sqrt(prec(axis, axis)));
  }
  return w;
}

double WavegroupState::incident_leakage(double t) const {
  const double h = config_.hbar;
  const PacketAtTime p1(packets_[0], t, h), pm(packets_[1], t, h), p2(packets_[2], t, h);
  const double s1 = packet_width(packets_[0], t, h), sm = packet_width(packets_[1], t, h);
  if (bodies() == 2)
    return 0.5 * std::erfc((pm.center - p1.center) / (std::sqrt(2.0) * std::hypot(s1, sm)));
  const double s2 = packet_width(packets_[2], t, h);
  // P(x1 > X or X > x2) = Q1 + (1 - Q1) Q2, integrated over the mirror density
  auto integrand = [&](double X) {
    const double q1 = 0.5 * std::erfc((X - p1.center) / (std::sqrt(2.0) * s1));
    const double q2 = 0.5 * std::erfc((p2.center - X) / (std::sqrt(2.0) * s2));
    const double z = (X - pm.center) / sm;
    const double rho = std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * sm);
    return rho * (q1 + (1.0 - q1) * q2);
  };
  Quadrature q{1e-15, 50};
  return adaptive_simpson(integrand, pm.center - 12.0 * sm, pm.center + 12.0 * sm, q, 64).value;
}

// ---- grids ----

void check_grid(const GridSpec& g, std::size_t& cells) {
  if (g.axes.empty() || g.axes.size() > 3) throw ConfigError("grid", "need 1 to 3 swept axes");
  bool seen[3] = {false, false, false};
  cells = 1;
  for (const auto& a : g.axes) {
    const int c = static_cast<int>(a.coord);
    if (seen[c]) throw ConfigError("grid", "axis " + std::string(coord_name(a.coord)) + " repeated");
    seen[c] = true;
    if (a.n == 0) throw ConfigError("grid", "axis with zero samples");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || a.max < a.min)
      throw ConfigError("grid", "axis bounds must be finite with min <= max");
    if (a.n > 1 && a.max == a.min) throw ConfigError("grid", "degenerate axis with n > 1");
    if (cells > g.cell_cap / a.n)
      throw ConfigError("grid", "grid exceeds the cell cap of " + std::to_string(g.cell_cap));
    cells *= a.n;
  }
}

std::vector<std::string> sampling_warnings(const SystemConfig& c, const GridSpec& g) {
  std::vector<std::string> out;
  for (const auto& a : g.axes) {
    if (a.n < 2) continue;
    const double period = axis_fringe_spacing(c, a.coord);
    const double step = (a.max - a.min) / static_cast<double>(a.n - 1);
    if (std::isfinite(period) && step > period / 8.0) {
      std::ostringstream os;
      os << "axis " << coord_name(a.coord) << ": step " << step << " is coarser than 1/8 of the fringe spacing "
         << period;
      out.push_back(os.str());
    }
  }
  return out;
}

Field sample_grid(const WavegroupState& s, const GridSpec& g, double t, int threads) {
  std::size_t cells = 0;
  check_grid(g, cells);
  if (s.bodies() == 2)
    for (const auto& a : g.axes)
      if (a.coord == Coord::x2) throw ConfigError("grid", "two-body state has no x2 axis");

  Field f;
  for (const auto& a : g.axes) f.axes.push_back(Axis{std::string(coord_name(a.coord)), a.min, a.max, a.n});
  bool swept[3] = {false, false, false};
  for (const auto& a : g.axes) swept[static_cast<int>(a.coord)] = true;
  for (int c = 0; c < s.bodies(); ++c)
    if (!swept[c]) f.fixed.emplace_back(std::string(coord_name(static_cast<Coord>(c))), g.fixed[c]);
  f.t = t;
  f.config_hash = s.config_hash();
  f.warnings = sampling_warnings(s.config(), g);
  f.allocate();

  const double hbar = s.config().hbar;
  const std::array<PacketAtTime, 3> pk{PacketAtTime(s.packet(0), t, hbar), PacketAtTime(s.packet(1), t, hbar),
                                       PacketAtTime(s.packet(2), t, hbar)};
  const auto& last = g.axes.back();
  const int last_c = static_cast<int>(last.coord);
  const std::size_t nlast = last.n;
  const std::size_t rows = cells / nlast;
  const Axis last_axis = f.axes.back();
  const auto& kern = simd::kernels();
  const int nb = s.bodies();

  parallel_for(
      rows,
      [&](std::size_t r) {
        Vec3 x = g.fixed;
        std::size_t rem = r;
        for (std::size_t k = g.axes.size() - 1; k-- > 0;) {
          const std::size_t i = rem % f.axes[k].n;
          rem /= f.axes[k].n;
          x[static_cast<int>(g.axes[k].coord)] = f.axes[k].at(i);
        }
        std::vector<cplx> acc(nlast, cplx(0.0)), term(nlast);
        for (PathId p : s.active_paths()) {
          const Mat3& m = s.coordinate_map(p);
          for (std::size_t i = 0; i < nlast; ++i) {
            x[last_c] = last_axis.at(i);
            const Vec3 y = m * x;
            cplx e = 0.0;
            for (int j = 0; j < nb; ++j) e += pk[j].log_eval(y[j]);
            term[i] = std::exp(e);
          }
          kern.caxpy(cplx(s.amplitude_weight(p), 0.0), term.data(), acc.data(), nlast);
        }
        double* out = f.values.data() + r * nlast;
        kern.abs2(acc.data(), out, nlast);
        if (g.mask_outside_domain) {
          for (std::size_t i = 0; i < nlast; ++i) {
            x[last_c] = last_axis.at(i);
            if (!in_domain(s.config(), {x[0], x[1], x[2]})) out[i] = 0.0;
          }
        }
      },
      threads);
  return f;
}

Field sample_line(const WavegroupState& s, const Vec3& origin, const Vec3& direction, const Axis& param,
                  double t, bool mask_outside_domain) {
  Field f;
  f.axes.push_back(param);
  const char* names[3] = {"x1", "X", "x2"};
  for (int c = 0; c < 3; ++c) f.fixed.emplace_back(std::string("origin.") + names[c], origin[c]);
  for (int c = 0; c < 3; ++c) f.fixed.emplace_back(std::string("direction.") + names[c], direction[c]);
  f.t = t;
  f.config_hash = s.config_hash();
  f.allocate();
  for (std::size_t i = 0; i < param.n; ++i) {
    const Vec3 x = origin + param.at(i) * direction;
    const Amplitude a = s.amplitude(x, t);
    f.values[i] = (mask_outside_domain && !a.in_domain) ? 0.0 : std::norm(a.value);
  }
  return f;
}

// ---- norm ----

QuadResult norm_integral(const WavegroupState& s, double t, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
  const auto box = s.envelope_box(t, 8.0);
  const int nb = s.bodies();
  double width[3];
  for (int j = 0; j < nb; ++j) {
    const double period = axis_fringe_spacing(s.config(), static_cast<Coord>(j));
    width[j] = std::min(period / 8.0, 0.5 * s.min_conditional_width(t, j));
  }
  const double l0 = box.hi[0] - box.lo[0], l1 = box.hi[1] - box.lo[1];
  bool converged = true;
  std::size_t evals = 0;
  const std::size_t cap = 1u << 16;
  auto panels = [&](double len, int j) { return std::min(cap, panels_for(len, width[j])); };

  QuadResult outer;
  if (nb == 2) {
    const Quadrature qo{tol / 2.0, 40}, qi{tol / (2.0 * l0), 40};
    outer = adaptive_simpson(
        [&](double x1) {
          const double a = std::max(x1, box.lo[1]);
          if (!(box.hi[1] > a)) return 0.0;
          auto r = adaptive_simpson([&](double X) { return s.pdf(Vec3(x1, X, 0.0), t); }, a, box.hi[1], qi,
                                    panels(box.hi[1] - a, 1));
          converged &= r.converged;
          evals += r.evaluations;
          return r.value;
        },
        box.lo[0], box.hi[0], qo, panels(l0, 0));
  } else {
    const Quadrature qo{tol / 3.0, 40}, qm{tol / (3.0 * l0), 40}, qi{tol / (3.0 * l0 * l1), 40};
    outer = adaptive_simpson(
        [&](double x1) {
          const double a = std::max(x1, box.lo[1]);
          if (!(box.hi[1] > a)) return 0.0;
          auto mid = adaptive_simpson(
              [&](double X) {
                const double b = std::max(X, box.lo[2]);
                if (!(box.hi[2] > b)) return 0.0;
                auto r = adaptive_simpson([&](double x2) { return s.pdf(Vec3(x1, X, x2), t); }, b, box.hi[2],
                                          qi, panels(box.hi[2] - b, 2));
                converged &= r.converged;
                evals += r.evaluations;
                return r.value;
              },
              a, box.hi[1], qm, panels(box.hi[1] - a, 1));
          converged &= mid.converged;
          return mid.value;
        },
        box.lo[0], box.hi[0], qo, panels(l0, 0));
  }
  outer.converged = outer.converged && converged;
  outer.evaluations += evals;
  return outer;
}

double norm(const WavegroupState& s, double t, double tol) {
  const QuadResult r = norm_integral(s, t, tol);
  if (!r.converged) throw NumericalError("norm: quadrature did not converge", r.value);
  return r.value;
}

}  // namespace corrint
