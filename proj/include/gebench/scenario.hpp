#pragma once

// Scenario description for the closed-loop bench simulation, with the
// published bench parameters as defaults.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gebench/attitude_estimation.hpp"
#include "gebench/bench_dynamics.hpp"
#include "gebench/flight_control.hpp"
#include "gebench/ge_models.hpp"
#include "gebench/ipt_link.hpp"
#include "gebench/motor_propeller.hpp"

namespace gebench {

enum class Feedback { kTruth, kEstimate };
enum class ProfileShape { kLinear, kSmooth };
enum class CurrentReference { kExact, kApproximate };

struct ProfilePoint {
  double t = 0.0;
  double value = 0.0;
};

struct TimelineConfig {
  double hover_altitude = 0.3;  ///< z_ref after takeoff [m]
  double takeoff_ramp = 2.0;    ///< linear z_ref ramp from 0 [s]
  bool start_in_hover = false;  ///< start at the hover equilibrium instead of the ground
  /// theta_ref breakpoints; held constant outside the listed span.
  std::vector<ProfilePoint> pitch_profile{
      {0.0, 0.0}, {20.0, 0.0}, {21.0, 0.05}, {30.0, 0.05}, {31.0, 0.0}};
  ProfileShape pitch_shape = ProfileShape::kSmooth;
};

struct ControlSettings {
  FlightControlConfig flight;
  double servo_bandwidth = 60.0;  ///< motor speed-servo double pole [rad/s]
  bool enabled = true;            ///< false holds both speed references at zero
  Feedback feedback = Feedback::kTruth;
  /// Give the observer the servo and rate-filter dynamics as its nominal input model.
  bool dob_input_model = true;
};

/// Flight-controller settings as used in closed loop.
inline FlightControlConfig effective_flight_config(const ControlSettings& c) {
  FlightControlConfig f = c.flight;
  if (c.dob_input_model) {
    f.dob.actuator_bandwidth = c.servo_bandwidth;
    f.dob.velocity_filter = f.altitude_rolloff;
  }
  return f;
}

struct EstimatorSettings {
  double forgetting = 0.9985;
  double initial_altitude = 0.3;
  double initial_covariance = 10.0;
  double altitude_ceiling = 0.0;  ///< <= 0 selects 3 R
  double cog_offset = 0.0;
  /// Out-of-ground-effect reference currents; NaN derives them from the hover thrust.
  std::array<double, 2> i_m_inf{std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN()};
  CurrentReference reference = CurrentReference::kExact;
};

struct NoiseConfig {
  double current_sigma = 0.0;  ///< Gaussian current-sensor noise [A]
  std::uint64_t seed = 42;
};

struct DisturbanceConfig {
  double force = 0.0;       ///< constant extra vertical force [N]
  double start_time = 0.0;  ///< applied from this time on [s]
};

struct Window {
  double begin = 0.0;
  double end = 0.0;
  bool contains(double t) const { return t >= begin && t <= end; }
};

struct EvaluationConfig {
  Window hover{10.0, 20.0};
  Window maneuver{20.0, 40.0};
  double altitude_tolerance = 3e-3;  ///< steady altitude estimation error bound [m]
  double pitch_tolerance = 0.04;     ///< pitch estimation error bound [rad]
};

struct ScenarioConfig {
  std::string name = "bench";
  BodyParams body;
  /// The published rotor inertias (0.4 and 0.392) are read as g m^2; see
  /// kPublishedMotorInertia for the literal values.
  std::array<MotorParams, 2> motors{
      MotorParams{0.0664, 0.4e-3, 4.6e-6, 9.56e-6, 2.4e-3, 3.99e-4},
      MotorParams{0.0651, 0.392e-3, 4.51e-6, 9.88e-6, 2.35e-3, 3.99e-4}};
  std::array<PropellerGeParams, 2> ge_true{PropellerGeParams{3.11, 3.56, 0.34},
                                           PropellerGeParams{2.20, 2.97, 0.34}};
  std::array<PropellerGeParams, 2> ge_nominal = ge_true;
  ControlSettings control;
  EstimatorSettings estimator;
  IptCircuitParams ipt;
  CouplingMap coupling;
  TimelineConfig timeline;
  double dt = 1e-3;
  double duration = 40.0;
  NoiseConfig noise;
  DisturbanceConfig disturbance;
  EvaluationConfig evaluation;
};

inline ScenarioConfig bench_scenario() { return ScenarioConfig{}; }

/// Rotor inertias exactly as tabulated, taken as kg m^2 [kg m^2].
inline constexpr std::array<double, 2> kPublishedMotorInertia{0.4, 0.392};

/// The bench scenario with the tabulated inertias taken literally.
inline ScenarioConfig bench_scenario_literal_inertia() {
  ScenarioConfig c;
  c.name = "bench_literal_inertia";
  for (std::size_t k = 0; k < 2; ++k) c.motors[k].inertia = kPublishedMotorInertia[k];
  return c;
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& errors)
      : std::runtime_error(join(errors)), errors_(errors) {}
  explicit ConfigError(const std::string& error) : ConfigError(std::vector<std::string>{error}) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::ostringstream os;
    os << "invalid scenario:";
    for (const auto& s : e) os << "\n  " << s;
    return os.str();
  }
  std::vector<std::string> errors_;
};

/// Motor inertia above which validation warns [kg m^2].
inline constexpr double kSuspiciousMotorInertia = 0.01;

inline ValidationReport validate(const ScenarioConfig& c) {
  ValidationReport r;
  auto prefixed = [&](const std::string& prefix, const std::vector<std::string>& errs) {
    for (const auto& e : errs) r.errors.push_back(prefix + e);
  };
  prefixed("body.", check_body_params(c.body));
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string p = "motors[" + std::to_string(k) + "].";
    prefixed(p, check_motor_params(c.motors[k]));
    if (c.motors[k].inertia > kSuspiciousMotorInertia) {
      std::ostringstream os;
      os << p << "inertia = " << c.motors[k].inertia
         << " kg m^2 is large for a propeller motor (published table value, possibly a unit typo)";
      r.warnings.push_back(os.str());
    }
    if (r.errors.empty()) {
      const double w_hover = std::sqrt(c.body.weight() / 2.0 / c.motors[k].thrust_coef);
      if (!steady_state_dominance(c.motors[k], w_hover)) {
        r.warnings.push_back(p + "quadratic current approximation is weak at hover speed");
      }
    }
    for (const auto* which : {"ge_true", "ge_nominal"}) {
      const auto& g = std::string(which) == "ge_true" ? c.ge_true[k] : c.ge_nominal[k];
      const std::string q = std::string("ground_effect.") + which + "[" + std::to_string(k) + "].";
      if (!(g.c_a > 0.0)) r.errors.push_back(q + "c_a: must be > 0");
      if (!(g.c_b > 0.0)) r.errors.push_back(q + "c_b: must be > 0");
      if (!(g.rotor_radius > 0.0)) r.errors.push_back(q + "rotor_radius: must be > 0");
    }
  }
  const auto& fc = c.control.flight;
  if (!(fc.altitude_pole > 0.0)) r.errors.push_back("control.altitude_pole: must be > 0");
  if (!(fc.pitch_pole > 0.0)) r.errors.push_back("control.pitch_pole: must be > 0");
  if (!(fc.altitude_rolloff > 0.0)) r.errors.push_back("control.altitude_rolloff: must be > 0");
  if (!(fc.pitch_rolloff > 0.0)) r.errors.push_back("control.pitch_rolloff: must be > 0");
  if (!(fc.thrust_limit_factor > 1.0)) {
    r.errors.push_back("control.thrust_limit_factor: must be > 1");
  }
  if (!(c.control.servo_bandwidth > 0.0)) r.errors.push_back("control.servo_bandwidth: must be > 0");
  if (fc.dob.enabled && !(fc.dob.cutoff > 0.0)) r.errors.push_back("dob.cutoff: must be > 0");
  if (fc.dob.enabled && fc.dob.cutoff < 5.0 * fc.altitude_pole) {
    r.warnings.push_back("dob.cutoff: below 5x the altitude pole");
  }

  const auto& e = c.estimator;
  if (!(e.forgetting > 0.0 && e.forgetting <= 1.0)) {
    r.errors.push_back("estimator.forgetting: must lie in (0, 1]");
  }
  if (!(e.initial_covariance > 0.0)) r.errors.push_back("estimator.initial_covariance: must be > 0");
  if (!(e.initial_altitude >= 0.0)) r.errors.push_back("estimator.initial_altitude: must be >= 0");
  for (std::size_t k = 0; k < 2; ++k) {
    if (!std::isnan(e.i_m_inf[k]) && !(e.i_m_inf[k] > 0.0)) {
      r.errors.push_back("estimator.i_m_inf[" + std::to_string(k) + "]: must be > 0");
    }
  }

  for (const auto& s : check_ipt_circuit(c.ipt)) r.errors.push_back("ipt." + s);

  if (!(c.dt > 0.0)) r.errors.push_back("sim.dt: must be > 0");
  if (!(c.duration >= c.dt)) r.errors.push_back("sim.duration: must be >= dt");
  if (!(c.noise.current_sigma >= 0.0)) r.errors.push_back("noise.current_sigma: must be >= 0");
  if (!(c.timeline.hover_altitude >= 0.0)) {
    r.errors.push_back("timeline.hover_altitude: must be >= 0");
  }
  if (!(c.timeline.takeoff_ramp >= 0.0)) r.errors.push_back("timeline.takeoff_ramp: must be >= 0");
  const auto& prof = c.timeline.pitch_profile;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (i > 0 && !(prof[i].t > prof[i - 1].t)) {
      r.errors.push_back("timeline.pitch_profile[" + std::to_string(i) +
                         "]: times must be strictly increasing");
    }
    if (!(std::abs(prof[i].value) < 1.0)) {
      r.errors.push_back("timeline.pitch_profile[" + std::to_string(i) +
                         "]: |theta| must stay below 1 rad");
    }
  }
  auto check_window = [&](const Window& w, const char* name) {
    if (!(w.end > w.begin)) r.errors.push_back(std::string("evaluation.") + name + ": end must exceed begin");
  };
  check_window(c.evaluation.hover, "hover_window");
  check_window(c.evaluation.maneuver, "maneuver_window");
  return r;
}

inline void require_valid(const ScenarioConfig& c) {
  auto r = validate(c);
  if (!r.ok()) throw ConfigError(r.errors);
}

/// Out-of-ground-effect reference current of motor k at the hover thrust m g / 2.
inline double hover_reference_current(const ScenarioConfig& c, std::size_t k) {
  if (!std::isnan(c.estimator.i_m_inf[k])) return c.estimator.i_m_inf[k];
  const auto& m = c.motors[k];
  const double f = c.body.weight() / 2.0;
  if (c.estimator.reference == CurrentReference::kApproximate) return current_out_of_ge(f, m);
  return steady_current(std::sqrt(f / m.thrust_coef), m, true);
}

inline EstimatorConfig make_estimator_config(const ScenarioConfig& c) {
  EstimatorConfig e;
  e.forgetting = c.estimator.forgetting;
  e.initial_altitude = c.estimator.initial_altitude;
  e.initial_covariance = c.estimator.initial_covariance;
  e.altitude_ceiling = c.estimator.altitude_ceiling > 0.0
                           ? c.estimator.altitude_ceiling
                           : 3.0 * c.ge_nominal[0].rotor_radius;
  e.cog_offset = c.estimator.cog_offset;
  e.arm = c.body.arm;
  e.ge = c.ge_nominal;
  e.i_m_inf = {hover_reference_current(c, 0), hover_reference_current(c, 1)};
  return e;
}

}  // namespace gebench
