#pragma once

// Two-degree-of-freedom bench: vertical translation z and pitch theta.
//
//   m z'' + c z'   = (F1 + F2) cos(theta) - m g
//   J th'' + D th' = (F1 - F2) l
//
// Propeller 1 sits on the +theta side, so z1 = z + l sin(theta).

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gebench {

inline constexpr double kStandardGravity = 9.80665;

struct BodyParams {
  double mass = 7.0;             ///< m [kg]
  double drag = 1.0e-3;          ///< c [N s / m]
  double inertia = 2.34;         ///< J [kg m^2]
  double rot_viscosity = 1.0e-7; ///< D [N m s / rad]
  double arm = 0.63;             ///< l [m]
  double gravity = kStandardGravity;

  double weight() const { return mass * gravity; }
};

inline std::vector<std::string> check_body_params(const BodyParams& p) {
  std::vector<std::string> out;
  auto pos = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(std::string(name) + ": must be > 0, got " + std::to_string(v));
  };
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0)) out.push_back(std::string(name) + ": must be >= 0, got " + std::to_string(v));
  };
  pos(p.mass, "mass");
  pos(p.inertia, "inertia");
  pos(p.arm, "arm");
  pos(p.gravity, "gravity");
  nonneg(p.drag, "drag");
  nonneg(p.rot_viscosity, "rot_viscosity");
  return out;
}

struct BenchState {
  double z = 0.0;
  double z_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct BenchDerivative {
  double z_dot = 0.0;
  double z_ddot = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;
};

/// `external_force` is an additional vertical force [N] (disturbance input).
inline BenchDerivative dynamics_derivative(const BenchState& s, double f1, double f2,
                                           const BodyParams& p, double external_force = 0.0) {
  const double c = std::cos(s.theta);
  BenchDerivative d;
  d.z_dot = s.z_dot;
  d.z_ddot = ((f1 + f2) * c - p.weight() - p.drag * s.z_dot + external_force) / p.mass;
  d.theta_dot = s.theta_dot;
  d.theta_ddot = ((f1 - f2) * p.arm - p.rot_viscosity * s.theta_dot) / p.inertia;
  return d;
}

struct PropellerAltitudes {
  double z1 = 0.0;
  double z2 = 0.0;
  bool clamped = false;  ///< one of the propellers would be below ground
};

inline PropellerAltitudes propeller_altitudes(const BenchState& s, const BodyParams& p) {
  const double h = p.arm * std::sin(s.theta);
  PropellerAltitudes a{s.z + h, s.z - h, false};
  if (a.z1 < 0.0) { a.z1 = 0.0; a.clamped = true; }
  if (a.z2 < 0.0) { a.z2 = 0.0; a.clamped = true; }
  return a;
}

class SingularAllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PropellerForces {
  double f1 = 0.0;
  double f2 = 0.0;
};

struct BodyWrench {
  double f_z = 0.0;      ///< vertical force [N]
  double t_theta = 0.0;  ///< pitch torque [N m]
};

/// (F_z, T_theta) -> (F1, F2). Throws when cos(theta) is below `cos_tolerance`.
inline PropellerForces allocate(double f_z, double t_theta, double theta, double arm,
                                double cos_tolerance = 1e-6) {
  const double c = std::cos(theta);
  if (c <= cos_tolerance) {
    throw SingularAllocationError("allocation singular: cos(theta)=" + std::to_string(c));
  }
  const double common = f_z / (2.0 * c);
  const double diff = t_theta / (2.0 * arm);
  return {common + diff, common - diff};
}

/// (F1, F2) -> (F_z, T_theta); the forward map that `allocate` inverts.
inline BodyWrench wrench_from_forces(double f1, double f2, double theta, double arm) {
  return {(f1 + f2) * std::cos(theta), (f1 - f2) * arm};
}

/// Nominal double-integrator plant 1 / (M s^2).
struct DoubleIntegrator {
  double inertia_like = 1.0;  ///< M [kg or kg m^2]
  double gain() const { return 1.0 / inertia_like; }
  /// Unit-step response of the plant at time t.
  double step_response(double t) const { return gain() * t * t / 2.0; }
};

struct NominalPlants {
  DoubleIntegrator vertical;
  DoubleIntegrator pitch;
};

inline NominalPlants nominal_plants(const BodyParams& p) {
  return {DoubleIntegrator{p.mass}, DoubleIntegrator{p.inertia}};
}

}  // namespace gebench
