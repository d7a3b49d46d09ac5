#pragma once

// Ground-effect ratio models.
//
// The classical power-ratio models (Betz, Cheeseman-Bennett, Hayden) vanish at
// the ground and are kept for comparison only. The finite thrust model
//
//   F / F_inf = 1 + C_a exp(-C_b z / R)
//
// stays bounded at z = 0, and its reciprocal is the motor-current ratio used
// for altitude estimation:
//
//   I_m / I_m_inf = 1 / (1 + C_a exp(-C_b z / R))
//   z = -(R / C_b) ln[(I_m_inf / I_m - 1) / C_a]

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gebench {

class ModelDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Per-propeller coefficients of the finite ground-effect model.
struct PropellerGeParams {
  double c_a = 3.11;           ///< maximum thrust-ratio gain [-]
  double c_b = 3.56;           ///< decay-rate coefficient [-]
  double rotor_radius = 0.34;  ///< [m]

  void validate() const {
    if (!(c_a > 0.0) || !(c_b > 0.0) || !(rotor_radius > 0.0)) {
      std::ostringstream os;
      os << "ground-effect params must be positive (c_a=" << c_a << ", c_b=" << c_b
         << ", rotor_radius=" << rotor_radius << ")";
      throw ModelDomainError(os.str());
    }
  }
};

struct HaydenParams {
  double a_coef = 1.0;
  double b_coef = 0.03;
};

struct BladeGeometry {
  double lift_slope = 5.7;        ///< C_l_alpha [1/rad]
  double solidity = 0.1;          ///< sigma [-]
  double collective_pitch = 0.2;  ///< theta_0 [rad]
};

namespace detail {
inline void require_positive_radius(double r) {
  if (!(r > 0.0)) throw ModelDomainError("rotor radius must be positive, got " + std::to_string(r));
}
inline void require_positive_altitude(double z, const char* model) {
  if (!(z > 0.0)) {
    throw ModelDomainError(std::string(model) + " power ratio is singular at z <= 0, got z=" +
                           std::to_string(z));
  }
}
}  // namespace detail

/// P/P_inf = 2z/R. Only meaningful for z << R; the value is not clamped.
inline double betz_power_ratio(double z, double r) {
  detail::require_positive_radius(r);
  if (z < 0.0) throw ModelDomainError("altitude must be non-negative");
  return 2.0 * z / r;
}

inline double cheeseman_power_ratio(double z, double r) {
  detail::require_positive_radius(r);
  detail::require_positive_altitude(z, "cheeseman");
  const double q = r / (4.0 * z);
  return 1.0 / (1.0 + q * q);
}

inline double hayden_power_ratio(double z, double r, const HaydenParams& p = {}) {
  detail::require_positive_radius(r);
  detail::require_positive_altitude(z, "hayden");
  const double q = 2.0 * r / z;
  return 1.0 / (p.a_coef + p.b_coef * q * q);
}

/// In-ground-effect thrust coefficient C_IGE(z) = 1 + C_a exp(-C_b z / R).
inline double he_thrust_ratio(double z, const PropellerGeParams& p) {
  return 1.0 + p.c_a * std::exp(-p.c_b * z / p.rotor_radius);
}

/// I_m / I_m_inf at constant required thrust; equals 1 / he_thrust_ratio(z).
inline double current_ratio_ige(double z, const PropellerGeParams& p) {
  return 1.0 / he_thrust_ratio(z, p);
}

/// Maximum thrust ratio C_a from blade geometry.
inline double max_thrust_ratio_from_geometry(const BladeGeometry& g) {
  const double cl = g.lift_slope;
  const double s = g.solidity;
  const double th = g.collective_pitch;
  const double disc = 192.0 * cl * s * th + 9.0 * cl * s * s;
  if (disc < 0.0) {
    std::ostringstream os;
    os << "C_a discriminant negative: 192*Cla*sigma*theta0 + 9*Cla*sigma^2 = " << disc;
    throw ModelDomainError(os.str());
  }
  const double root = std::sqrt(disc);
  const double den = 32.0 * th + 3.0 * cl * s - root;
  if (!(den > 0.0)) {
    std::ostringstream os;
    os << "C_a denominator non-positive: 32*theta0 + 3*Cla*sigma - sqrt(...) = " << den
       << " (Cla=" << cl << ", sigma=" << s << ", theta0=" << th << ")";
    throw ModelDomainError(os.str());
  }
  return (root - 3.0 * cl * s) / den;
}

enum class AltitudeStatus {
  kValid,          ///< inside the model's range
  kBelowGround,    ///< current at or below the ground-level value; clamped to 0
  kBeyondGe,       ///< current at or above I_m_inf; model carries no information
};

struct AltitudeFromCurrent {
  double altitude = 0.0;  ///< [m]
  AltitudeStatus status = AltitudeStatus::kValid;
};

/// Inverts the current-ratio model. `ceiling` is returned for currents at or
/// above the out-of-ground-effect reference.
inline AltitudeFromCurrent altitude_from_current(double i_m, double i_m_inf,
                                                 const PropellerGeParams& p, double ceiling) {
  if (!(i_m_inf > 0.0)) throw ModelDomainError("i_m_inf must be positive");
  if (i_m >= i_m_inf) return {ceiling, AltitudeStatus::kBeyondGe};
  if (i_m <= i_m_inf / (1.0 + p.c_a)) return {0.0, AltitudeStatus::kBelowGround};
  const double arg = (i_m_inf / i_m - 1.0) / p.c_a;
  return {-(p.rotor_radius / p.c_b) * std::log(arg), AltitudeStatus::kValid};
}

inline AltitudeFromCurrent altitude_from_current(double i_m, double i_m_inf,
                                                 const PropellerGeParams& p) {
  return altitude_from_current(i_m, i_m_inf, p, 3.0 * p.rotor_radius);
}

}  // namespace gebench
