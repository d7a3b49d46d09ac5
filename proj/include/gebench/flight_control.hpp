#pragma once

// Outer-loop controllers for the bench.
//
// Both loops are designed on the nominal double integrator 1/(M s^2) by
// multiple-root pole placement: the altitude PID puts all three closed-loop
// roots at -p, the pitch PD puts both roots at -p. The derivative acts on the
// filtered measurement. Setpoint weight b is realized as the reference
// prefilter (b Kp s + Ki) / (Kp s + Ki) ahead of a P-on-error PID, so the
// integrator keeps holding only the force offset. With b = 0 the altitude
// loop is Ki / (M (s + p)^3); with b = 1 it is (Kp s + Ki) / (M (s + p)^3).

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gebench/bench_dynamics.hpp"
#include "gebench/motor_propeller.hpp"

namespace gebench {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;  ///< zero for PD
  double kd = 0.0;
};

/// PID for 1/(M s^2): M s^3 + Kd s^2 + Kp s + Ki == M (s + p)^3.
inline PidGains place_pid_double_integrator(double inertia_like, double pole) {
  const double m = inertia_like;
  const double p = pole;
  return {3.0 * m * p * p, m * p * p * p, 3.0 * m * p};
}

/// PD for 1/(M s^2): M s^2 + Kd s + Kp == M (s + p)^2.
inline PidGains place_pd_double_integrator(double inertia_like, double pole) {
  const double m = inertia_like;
  const double p = pole;
  return {m * p * p, 0.0, 2.0 * m * p};
}

struct PidConfig {
  PidGains gains;
  double derivative_rolloff = 100.0;  ///< first-order roll-off of the rate estimate [rad/s]
  double setpoint_weight = 1.0;       ///< b in Kp (b r - y)
  double out_min = -std::numeric_limits<double>::infinity();
  double out_max = std::numeric_limits<double>::infinity();
};

/// Discrete PID with derivative on the measurement. The integral term is
/// clamped to [out_min, out_max].
class PidController {
 public:
  PidController() = default;
  explicit PidController(const PidConfig& cfg) : cfg_(cfg) {}

  const PidConfig& config() const { return cfg_; }

  void reset() {
    integral_ = 0.0;
    rate_ = 0.0;
    prev_measurement_ = 0.0;
    reference_lag_ = 0.0;
    primed_ = false;
  }

  /// Seeds the memory so that the first step sees no derivative kick.
  void preset(double measurement, double integral_term, double rate = 0.0) {
    prev_measurement_ = measurement;
    reference_lag_ = measurement;
    integral_ = integral_term;
    rate_ = rate;
    primed_ = true;
  }

  double step(double reference, double measurement, double dt) {
    if (!primed_) {
      prev_measurement_ = measurement;
      reference_lag_ = reference;
      primed_ = true;
    }
    reference = shaped_reference(reference, dt);
    const double wf = cfg_.derivative_rolloff;
    // backward-Euler realization of s wf / (s + wf)
    rate_ = (rate_ + wf * (measurement - prev_measurement_)) / (1.0 + wf * dt);
    prev_measurement_ = measurement;

    const double error = reference - measurement;
    integral_ = std::clamp(integral_ + cfg_.gains.ki * error * dt, cfg_.out_min, cfg_.out_max);
    const double u = cfg_.gains.kp * error + integral_ - cfg_.gains.kd * rate_;
    return std::clamp(u, cfg_.out_min, cfg_.out_max);
  }

  double integral_term() const { return integral_; }
  double rate() const { return rate_; }

 private:
  double shaped_reference(double r, double dt) {
    const double b = cfg_.setpoint_weight;
    if (b == 1.0) return r;
    if (!(cfg_.gains.ki > 0.0)) return b * r;
    const double tau = cfg_.gains.kp / cfg_.gains.ki;
    reference_lag_ += (1.0 - std::exp(-dt / tau)) * (r - reference_lag_);
    return b * r + (1.0 - b) * reference_lag_;
  }

  PidConfig cfg_;
  double reference_lag_ = 0.0;
  double integral_ = 0.0;
  double rate_ = 0.0;
  double prev_measurement_ = 0.0;
  bool primed_ = false;
};

struct DobConfig {
  double cutoff = 50.0;  ///< Q-filter cutoff [rad/s]
  bool enabled = true;
  /// Known input dynamics included in the nominal model. The speed servo is
  /// (2 wn s + wn^2) / (s + wn)^2; the velocity filter matches the rate
  /// estimate fed to the observer. Zero disables either.
  double actuator_bandwidth = 0.0;
  double velocity_filter = 0.0;
};

/// Disturbance observer on the force channel:
///   d_hat = Q(s) (M_n s v - A_n(s) u),   Q(s) = wq / (s + wq)
/// where v is the measured velocity and A_n the nominal input dynamics. With
/// A_n = 1 this is Q (M_n z'' - u). The acceleration is the mean over the last
/// step, (v[n] - v[n-1]) / dt, which is exact for a held force, and Q is the
/// step-invariant first-order filter.
class DisturbanceObserver {
 public:
  DisturbanceObserver() = default;
  explicit DisturbanceObserver(const DobConfig& cfg) : cfg_(cfg) {}

  const DobConfig& config() const { return cfg_; }

  void reset() {
    *this = DisturbanceObserver(cfg_);
  }

  /// Steady-state seed: constant velocity and a constant applied command.
  void preset(double velocity, double applied_command) {
    prev_velocity_ = velocity;
    servo_out_ = applied_command;
    servo_int_ = applied_command / std::max(cfg_.actuator_bandwidth, 1e-300);
    filtered_command_ = applied_command;
    estimate_ = -applied_command;
    primed_ = true;
  }

  /// `applied_command` is the net force command that acted over the last step.
  double step(double velocity, double applied_command, double nominal_mass, double dt) {
    if (!cfg_.enabled) return 0.0;
    if (!primed_) preset(velocity, applied_command);
    const double u = shaped_command(applied_command, dt);
    const double a = 1.0 - std::exp(-cfg_.cutoff * dt);
    const double raw = nominal_mass * (velocity - prev_velocity_) / dt - u;
    prev_velocity_ = velocity;
    estimate_ += a * (raw - estimate_);
    return estimate_;
  }

  double estimate() const { return cfg_.enabled ? estimate_ : 0.0; }

 private:
  double shaped_command(double u, double dt) {
    double y = u;
    if (cfg_.actuator_bandwidth > 0.0) {
      // Linear servo model x' = 2 wn (r - x) + wn^2 q, q' = r - x, held input, RK4.
      const double wn = cfg_.actuator_bandwidth;
      auto f = [&](double x, double q) {
        return std::pair{2.0 * wn * (u - x) + wn * wn * q, u - x};
      };
      const double x = servo_out_, q = servo_int_ - u / wn;
      const auto [k1x, k1q] = f(x, q);
      const auto [k2x, k2q] = f(x + 0.5 * dt * k1x, q + 0.5 * dt * k1q);
      const auto [k3x, k3q] = f(x + 0.5 * dt * k2x, q + 0.5 * dt * k2q);
      const auto [k4x, k4q] = f(x + dt * k3x, q + dt * k3q);
      const double nx = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      const double nq = q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      servo_out_ = nx;
      servo_int_ = nq + u / wn;
      y = nx;
    }
    if (cfg_.velocity_filter > 0.0) {
      // Same backward-Euler form as the PID rate estimate.
      const double wf = cfg_.velocity_filter;
      filtered_command_ = (filtered_command_ + wf * dt * y) / (1.0 + wf * dt);
      y = filtered_command_;
    }
    return y;
  }

  DobConfig cfg_;
  double prev_velocity_ = 0.0;
  double servo_out_ = 0.0;
  double servo_int_ = 0.0;  ///< q + u / wn, so a steady seed is u / wn
  double filtered_command_ = 0.0;
  double estimate_ = 0.0;
  bool primed_ = false;
};

/// Free-function form of one disturbance-observer update.
inline double dob_step(DisturbanceObserver& dob, double velocity, double applied_command,
                       double nominal_mass, double dt) {
  return dob.step(velocity, applied_command, nominal_mass, dt);
}

struct FlightControlConfig {
  double altitude_pole = 10.0;
  double pitch_pole = 30.0;
  double altitude_rolloff = 100.0;
  double pitch_rolloff = 300.0;
  double altitude_setpoint_weight = 0.0;  ///< 0 keeps the reference out of the P term
  double thrust_limit_factor = 2.5;  ///< total thrust limited to [0, factor * m g]
  DobConfig dob;
};

struct ControlOutput {
  double f_z_ref = 0.0;
  double t_theta_ref = 0.0;
  double f1_ref = 0.0;
  double f2_ref = 0.0;
  double omega1_ref = 0.0;
  double omega2_ref = 0.0;
  double disturbance = 0.0;  ///< DOB estimate [N]
  bool thrust_clamped = false;
};

/// Altitude PID + DOB and pitch PD, followed by allocation and the inverse
/// thrust map. The controller only knows the nominal plant; ground effect is
/// a disturbance to it.
class FlightController {
 public:
  FlightController(const FlightControlConfig& cfg, const BodyParams& body, double c_f1,
                   double c_f2)
      : cfg_(cfg), body_(body), c_f1_(c_f1), c_f2_(c_f2), dob_(cfg.dob) {
    const double w = body.weight();
    PidConfig alt;
    alt.gains = place_pid_double_integrator(body.mass, cfg.altitude_pole);
    alt.derivative_rolloff = cfg.altitude_rolloff;
    alt.setpoint_weight = cfg.altitude_setpoint_weight;
    alt.out_min = -w;
    alt.out_max = (cfg.thrust_limit_factor - 1.0) * w;
    altitude_ = PidController(alt);

    PidConfig pitch;
    pitch.gains = place_pd_double_integrator(body.inertia, cfg.pitch_pole);
    pitch.derivative_rolloff = cfg.pitch_rolloff;
    const double t_max = cfg.thrust_limit_factor * w * body.arm;
    pitch.out_min = -t_max;
    pitch.out_max = t_max;
    pitch_ = PidController(pitch);
  }

  ControlOutput step(double z_ref, double theta_ref, double z_meas, double theta_meas, double dt) {
    const double w = body_.weight();
    const double u_pid = altitude_.step(z_ref, z_meas, dt);
    const double d_hat = dob_.step(altitude_.rate(), applied_, body_.mass, dt);

    ControlOutput out;
    out.disturbance = d_hat;
    const double f_max = cfg_.thrust_limit_factor * w;
    const double f_z_raw = w + u_pid - d_hat;
    out.f_z_ref = std::clamp(f_z_raw, 0.0, f_max);
    out.thrust_clamped = out.f_z_ref != f_z_raw;
    applied_ = out.f_z_ref - w;

    out.t_theta_ref = pitch_.step(theta_ref, theta_meas, dt);
    const auto f = allocate(out.f_z_ref, out.t_theta_ref, theta_meas, body_.arm);
    const auto s1 = bet_speed_for_thrust(f.f1, c_f1_);
    const auto s2 = bet_speed_for_thrust(f.f2, c_f2_);
    out.f1_ref = std::max(f.f1, 0.0);
    out.f2_ref = std::max(f.f2, 0.0);
    out.omega1_ref = s1.omega;
    out.omega2_ref = s2.omega;
    out.thrust_clamped = out.thrust_clamped || s1.clamped || s2.clamped;
    return out;
  }

  /// Seeds every memory for a steady operating point at zero tracking error
  /// with `f_z_ref` as the held vertical force. With the DOB on, the whole
  /// offset from m g sits in the observer and the integrator is zero.
  void preset_steady(double z_meas, double theta_meas, double f_z_ref) {
    applied_ = f_z_ref - body_.weight();
    altitude_.preset(z_meas, cfg_.dob.enabled ? 0.0 : applied_);
    pitch_.preset(theta_meas, 0.0);
    dob_.preset(0.0, applied_);
  }

  const PidController& altitude_loop() const { return altitude_; }
  const PidController& pitch_loop() const { return pitch_; }
  const DisturbanceObserver& observer() const { return dob_; }

 private:
  FlightControlConfig cfg_;
  BodyParams body_;
  double c_f1_;
  double c_f2_;
  PidController altitude_;
  PidController pitch_;
  DisturbanceObserver dob_;
  double applied_ = 0.0;
};

}  // namespace gebench
