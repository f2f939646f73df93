#include "corrint/kinematics.hpp"

#include <cmath>
#include <limits>

namespace corrint {

namespace {

// Embed a (body, mirror) block into the 3x3 map on (v1, V, v2).
Mat3 embed(const Eigen::Matrix2d& b, int body) {
  Mat3 e = Mat3::Identity();
  e(body, body) = b(0, 0);
  e(body, 1) = b(0, 1);
  e(1, body) = b(1, 0);
  e(1, 1) = b(1, 1);
  return e;
}

}  // namespace

CollisionMap collision_map(double m, double M) {
  if (!(m > 0.0) || !(M > 0.0)) throw ConfigError("mass", "collision masses must be positive");
  const double s = m + M;
  CollisionMap c;
  c.m = m;
  c.M = M;
  c.matrix << (m - M) / s, 2.0 * M / s, 2.0 * m / s, (M - m) / s;
  return c;
}

std::pair<double, double> collide(double m, double M, double v, double V) {
  if (!(m > 0.0) || !(M > 0.0)) throw ConfigError("mass", "collision masses must be positive");
  const double s = m + M;
  return {((m - M) * v + 2.0 * M * V) / s, ((M - m) * V + 2.0 * m * v) / s};
}

Vec3 masses(const SystemConfig& c) { return {c.particle1.mass, c.mirror.mass, c.particle2.mass}; }
Vec3 velocities(const SystemConfig& c) { return {c.particle1.v0, c.mirror.v0, c.particle2.v0}; }
Vec3 centers(const SystemConfig& c) { return {c.particle1.x0, c.mirror.x0, c.particle2.x0}; }
Vec3 wavevectors(const SystemConfig& c) {
  return masses(c).cwiseProduct(velocities(c)) / c.hbar;
}

double total_momentum(const Vec3& m, const Vec3& v) { return m.dot(v); }

double kinetic_energy(const Vec3& m, const Vec3& v) {
  return 0.5 * (m.array() * v.array() * v.array()).sum();
}

double omega(const SystemConfig& c, const Vec3& k) {
  const Vec3 m = masses(c);
  return c.hbar * 0.5 * (k[0] * k[0] / m[0] + k[1] * k[1] / m[1] + k[2] * k[2] / m[2]);
}

PathKinematics path_kinematics(const SystemConfig& c, PathId path) {
  const Mat3 c1 = embed(collision_map(c.particle1.mass, c.mirror.mass).matrix, 0);
  const Mat3 c2 = embed(collision_map(c.particle2.mass, c.mirror.mass).matrix, 2);
  PathKinematics pk;
  pk.path = path;
  switch (path) {
    case PathId::P1_incident: pk.velocity_map = Mat3::Identity(); break;
    case PathId::P2_refl1: pk.velocity_map = c1; break;
    case PathId::P3_refl2: pk.velocity_map = c2; break;
    // the second collision sees the mirror velocity left by the first
    case PathId::P4_refl1_then_2: pk.velocity_map = c2 * c1; break;
    case PathId::P5_refl2_then_1: pk.velocity_map = c1 * c2; break;
  }
  const Vec3 m = masses(c);
  const Mat3 d = m.asDiagonal();
  const Mat3 dinv = m.cwiseInverse().asDiagonal();
  pk.wavevector_map = d * pk.velocity_map * dinv;
  pk.final_velocities = pk.velocity_map * velocities(c);
  pk.conserved_p = total_momentum(m, pk.final_velocities);
  pk.conserved_E = kinetic_energy(m, pk.final_velocities);
  return pk;
}

double fringe_spacing(double m, double v, double V, double hbar) {
  if (v == V) throw ConfigError("v0", "fringe spacing undefined for v == V");
  return M_PI * hbar / (m * std::abs(V - v));
}

double axis_fringe_spacing(const SystemConfig& c, Coord axis) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto spacing = [&](const Body& b) {
    return b.v0 == c.mirror.v0 ? inf : fringe_spacing(b.mass, b.v0, c.mirror.v0, c.hbar);
  };
  const double s1 = spacing(c.particle1);
  const double s2 = c.bodies == 3 ? spacing(c.particle2) : inf;
  switch (axis) {
    case Coord::x1: return s1;
    case Coord::x2: return s2;
    case Coord::X: return std::min(s1, s2);
  }
  return inf;
}

ThermalLength coherence_length_thermal(double M, double T) {
  if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("mass", "must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("temperature", "must be positive");
  const double denom = std::sqrt(2.0 * M * kBoltzmann * T);
  if (denom == 0.0) return {std::numeric_limits<double>::infinity(), true};
  const double l = kPlanck / denom;
  if (!std::isfinite(l)) return {std::numeric_limits<double>::infinity(), true};
  return {l, false};
}

double ratio_R(const SystemConfig& c, PathId path) {
  if (path == PathId::P1_incident) throw ConfigError("path", "P1 carries no mirror kick");
  const auto pk = path_kinematics(c, path);
  const Vec3 k = wavevectors(c);
  const double dK = (pk.wavevector_map * k)[1] - k[1];
  return std::abs(dK) / c.mirror.sigma_k();
}

double substate_separation(const SystemConfig& c, PathId path, double t) {
  if (!(t >= 0.0)) throw ConfigError("t", "time since collision must be non-negative");
  const auto pk = path_kinematics(c, path);
  return std::abs(pk.final_velocities[1] - c.mirror.v0) * t;
}

}  // namespace corrint
