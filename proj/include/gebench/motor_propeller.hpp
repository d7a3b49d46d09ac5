#pragma once

// Motor and propeller relations.
//
//   J_w dw/dt + D_w w = K_t I_m - C_Q w^2 - T_C       (torque balance)
//   F = C_F w^2                                       (blade-element thrust)
//
// At constant speed the current is (C_Q w^2 + D_w w + T_C) / K_t, which is
// approximated by (C_Q / K_t) w^2 when the viscous and Coulomb terms are small.

#include <cmath>
#include <string>
#include <vector>

#include "gebench/ge_models.hpp"

namespace gebench {

struct MotorParams {
  double torque_coef = 0.0664;           ///< K_tau [N m / A]
  double inertia = 0.4e-3;               ///< J_omega [kg m^2]
  double viscosity = 4.6e-6;             ///< D_omega [N m s / rad]
  double counter_torque_coef = 9.56e-6;  ///< C_Q [N m s^2 / rad^2]
  double coulomb_torque = 2.4e-3;        ///< T_C [N m]
  double thrust_coef = 3.99e-4;          ///< C_F [N s^2 / rad^2]
};

struct MotorState {
  double omega = 0.0;    ///< [rad/s]
  double current = 0.0;  ///< [A]
};

/// Field-level problems with a parameter set. Empty means valid.
inline std::vector<std::string> check_motor_params(const MotorParams& p) {
  std::vector<std::string> out;
  auto pos = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(std::string(name) + ": must be > 0, got " + std::to_string(v));
  };
  pos(p.torque_coef, "torque_coef");
  pos(p.inertia, "inertia");
  pos(p.viscosity, "viscosity");
  pos(p.counter_torque_coef, "counter_torque_coef");
  pos(p.coulomb_torque, "coulomb_torque");
  pos(p.thrust_coef, "thrust_coef");
  return out;
}

/// True when C_Q w^2 dominates the viscous and Coulomb terms by 10x at `omega`,
/// the condition under which the quadratic current approximation holds.
inline bool steady_state_dominance(const MotorParams& p, double omega) {
  const double quad = p.counter_torque_coef * omega * omega;
  return quad > 10.0 * (p.viscosity * omega + p.coulomb_torque);
}

/// dw/dt for a given winding current.
inline double motor_torque_balance_derivative(const MotorState& s, double i_m,
                                              const MotorParams& p) {
  const double w = s.omega;
  return (p.torque_coef * i_m - p.counter_torque_coef * w * w - p.viscosity * w -
          p.coulomb_torque) /
         p.inertia;
}

/// Load torque C_Q w^2 + D_w w + T_C at speed `omega`.
inline double load_torque(double omega, const MotorParams& p) {
  return p.counter_torque_coef * omega * omega + p.viscosity * omega + p.coulomb_torque;
}

/// Current at constant speed. With `exact` false the viscous and Coulomb terms
/// are dropped, which is valid while D_w w, T_C << C_Q w^2.
inline double steady_current(double omega_c, const MotorParams& p, bool exact) {
  if (!exact) return p.counter_torque_coef / p.torque_coef * omega_c * omega_c;
  return load_torque(omega_c, p) / p.torque_coef;
}

inline double bet_thrust(double omega, double c_f) { return c_f * omega * omega; }

struct SpeedForThrust {
  double omega = 0.0;
  bool clamped = false;  ///< request was negative; propellers cannot push down
};

inline SpeedForThrust bet_speed_for_thrust(double f, double c_f) {
  if (f < 0.0) return {0.0, true};
  return {std::sqrt(f / c_f), false};
}

/// Out-of-ground-effect current for a required thrust: (C_Q / (K_t C_F)) F.
inline double current_out_of_ge(double f_required, const MotorParams& p) {
  return p.counter_torque_coef / (p.torque_coef * p.thrust_coef) * f_required;
}

/// Current needed to hold `f_required` at propeller altitude z.
inline double current_in_ge(double f_required, double z, const MotorParams& motor,
                            const PropellerGeParams& ge) {
  return current_out_of_ge(f_required, motor) / he_thrust_ratio(z, ge);
}

}  // namespace gebench
