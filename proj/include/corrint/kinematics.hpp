#pragma once

#include <Eigen/Dense>
#include <utility>

#include "corrint/model.hpp"

namespace corrint {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct CollisionMap {
  Eigen::Matrix2d matrix;  // acts on (v, V)
  double m = 1.0;
  double M = 1.0;
};

CollisionMap collision_map(double m, double M);
std::pair<double, double> collide(double m, double M, double v, double V);

struct PathKinematics {
  PathId path = PathId::P1_incident;
  Mat3 velocity_map = Mat3::Identity();
  Mat3 wavevector_map = Mat3::Identity();
  Vec3 final_velocities = Vec3::Zero();
  double conserved_p = 0.0;
  double conserved_E = 0.0;
};

PathKinematics path_kinematics(const SystemConfig& c, PathId path);

Vec3 masses(const SystemConfig& c);
Vec3 velocities(const SystemConfig& c);
Vec3 wavevectors(const SystemConfig& c);
Vec3 centers(const SystemConfig& c);
double total_momentum(const Vec3& m, const Vec3& v);
double kinetic_energy(const Vec3& m, const Vec3& v);
// omega(kappa) = hbar (k1^2/2m1 + K^2/2M + k2^2/2m2)
double omega(const SystemConfig& c, const Vec3& kappa);

// pi hbar / (m |V - v|)
double fringe_spacing(double m, double v, double V, double hbar = 1.0);
// Shortest fringe spacing seen along one coordinate axis.
double axis_fringe_spacing(const SystemConfig& c, Coord axis);

struct ThermalLength {
  double value = 0.0;
  bool infinite = false;
};
// SI inputs (kg, K); result in metres.
ThermalLength coherence_length_thermal(double M, double T);

double ratio_R(const SystemConfig& c, PathId path);
double substate_separation(const SystemConfig& c, PathId path, double t);

}  // namespace corrint
