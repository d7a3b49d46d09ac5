#pragma once

// Fixed-step closed-loop simulation of the bench.
//
// Signal path per control step:
//   (z_ref, theta_ref) -> altitude PID + DOB, pitch PD -> (F_z, T_theta)
//   -> allocation -> per-propeller thrust refs -> inverse thrust map
//   -> speed refs -> motor speed servos -> thrust with ground effect -> body
// Motor currents, sampled once per step, feed the attitude estimator.
//
// Body and motor states are integrated with RK4; controllers, estimator and
// sensor noise run once per step with zero-order hold.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gebench/scenario.hpp"

namespace gebench {

struct TrajectoryRow {
  double t = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double z_dot = 0.0;
  double theta_dot = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double z_hat = 0.0;
  double theta_hat = 0.0;
  double e_z = 0.0;
  double e_theta = 0.0;
  double k = 0.0;
  double eta = 0.0;
};

struct RunEvents {
  std::size_t ground_contacts = 0;  ///< steps where the contact clamp acted
  std::size_t thrust_clamps = 0;    ///< steps with a saturated thrust command
  std::size_t rejected_samples = 0; ///< non-positive current samples skipped
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  RunEvents events;
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& what, std::size_t last_valid_step)
      : std::runtime_error(what), last_valid_step_(last_valid_step) {}
  std::size_t last_valid_step() const { return last_valid_step_; }

 private:
  std::size_t last_valid_step_;
};

/// Continuous plant state: body, motor speeds and speed-servo integrators.
struct PlantState {
  BenchState body;
  std::array<double, 2> omega{};
  std::array<double, 2> servo_integral{};
};

struct PlantInputs {
  std::array<double, 2> omega_ref{};
  double external_force = 0.0;
};

struct PlantSignals {
  std::array<double, 2> current{};
  std::array<double, 2> thrust{};
  PropellerAltitudes altitudes;
};

/// Reference values of the scenario timeline.
class Timeline {
 public:
  explicit Timeline(const TimelineConfig& cfg) : cfg_(cfg) {}

  double altitude(double t) const {
    if (cfg_.start_in_hover || cfg_.takeoff_ramp <= 0.0) return cfg_.hover_altitude;
    return cfg_.hover_altitude * std::min(t / cfg_.takeoff_ramp, 1.0);
  }

  double pitch(double t) const {
    const auto& p = cfg_.pitch_profile;
    if (p.empty()) return 0.0;
    if (t <= p.front().t) return p.front().value;
    if (t >= p.back().t) return p.back().value;
    auto hi = std::upper_bound(p.begin(), p.end(), t,
                               [](double v, const ProfilePoint& q) { return v < q.t; });
    auto lo = hi - 1;
    double s = (t - lo->t) / (hi->t - lo->t);
    if (cfg_.pitch_shape == ProfileShape::kSmooth) s = 0.5 - 0.5 * std::cos(std::numbers::pi * s);
    return lo->value + s * (hi->value - lo->value);
  }

 private:
  TimelineConfig cfg_;
};

/// Motor speed servo: PI with load feed-forward, closed-loop double pole at
/// the configured bandwidth. Returns the winding current.
inline double servo_current(double omega, double omega_ref, double integral,
                            const MotorParams& m, double bandwidth) {
  const double wn = bandwidth;
  const double torque = m.inertia * (2.0 * wn * (omega_ref - omega) + wn * wn * integral) +
                        load_torque(omega_ref, m);
  return torque / m.torque_coef;
}

class BenchSimulation {
 public:
  explicit BenchSimulation(ScenarioConfig cfg)
      : cfg_(std::move(cfg)),
        timeline_(cfg_.timeline),
        controller_(effective_flight_config(cfg_.control), cfg_.body, cfg_.motors[0].thrust_coef,
                    cfg_.motors[1].thrust_coef),
        estimator_(make_estimator_config(cfg_)),
        rng_(cfg_.noise.seed) {
    require_valid(cfg_);
    if (cfg_.timeline.start_in_hover) init_hover();
  }

  PlantSignals signals(const PlantState& s, const PlantInputs& in) const {
    PlantSignals out;
    out.altitudes = propeller_altitudes(s.body, cfg_.body);
    const std::array<double, 2> zp{out.altitudes.z1, out.altitudes.z2};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& m = cfg_.motors[k];
      out.current[k] = servo_current(s.omega[k], in.omega_ref[k], s.servo_integral[k], m,
                                     cfg_.control.servo_bandwidth);
      const double w = std::max(s.omega[k], 0.0);
      out.thrust[k] = he_thrust_ratio(zp[k], cfg_.ge_true[k]) * bet_thrust(w, m.thrust_coef);
    }
    return out;
  }

  TrajectoryRecord run() {
    TrajectoryRecord rec;
    const auto steps = static_cast<std::size_t>(std::llround(cfg_.duration / cfg_.dt));
    rec.rows.reserve(steps + 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double sigma = cfg_.noise.current_sigma;

    for (std::size_t n = 0; n <= steps; ++n) {
      const double t = static_cast<double>(n) * cfg_.dt;
      const double z_ref = timeline_.altitude(t);
      const double th_ref = timeline_.pitch(t);

      const bool use_est = cfg_.control.feedback == Feedback::kEstimate;
      const double z_fb = use_est ? estimate_.z_hat : state_.body.z;
      const double th_fb = use_est ? estimate_.theta_hat : state_.body.theta;

      if (cfg_.control.enabled && !hover_primed_) {
        last_control_ = controller_.step(z_ref, th_ref, z_fb, th_fb, cfg_.dt);
        inputs_.omega_ref = {last_control_.omega1_ref, last_control_.omega2_ref};
        if (last_control_.thrust_clamped) ++rec.events.thrust_clamps;
      } else if (!cfg_.control.enabled) {
        inputs_.omega_ref = {0.0, 0.0};
      }
      hover_primed_ = false;
      inputs_.external_force = t >= cfg_.disturbance.start_time ? cfg_.disturbance.force : 0.0;

      const auto sig = signals(state_, inputs_);
      std::array<double, 2> measured = sig.current;
      if (sigma > 0.0) {
        for (auto& i : measured) i += sigma * noise(rng_);
      }
      estimate_ = estimator_.step(t, measured[0], measured[1]);

      TrajectoryRow row;
      row.t = t;
      row.z = state_.body.z;
      row.theta = state_.body.theta;
      row.z_dot = state_.body.z_dot;
      row.theta_dot = state_.body.theta_dot;
      row.omega1 = state_.omega[0];
      row.omega2 = state_.omega[1];
      row.f1 = sig.thrust[0];
      row.f2 = sig.thrust[1];
      row.i1 = measured[0];
      row.i2 = measured[1];
      row.z_hat = estimate_.z_hat;
      row.theta_hat = estimate_.theta_hat;
      row.e_z = row.z_hat - row.z;
      row.e_theta = row.theta_hat - row.theta;
      row.k = coupling_from_altitude(row.z, cfg_.coupling).k;
      row.eta = max_efficiency(row.k, cfg_.ipt);
      rec.rows.push_back(row);

      if (n == steps) break;
      step_plant();
      if (!finite(state_) || std::abs(state_.body.theta) >= std::numbers::pi / 2.0) {
        std::ostringstream os;
        os << "simulation diverged at t=" << t + cfg_.dt << " s (step " << n + 1 << ")";
        throw SimulationDiverged(os.str(), n);
      }
      if (state_.body.z < 0.0) {
        state_.body.z = 0.0;
        state_.body.z_dot = std::max(state_.body.z_dot, 0.0);
        ++rec.events.ground_contacts;
      }
    }
    rec.events.rejected_samples = estimator_.channel(0).rejected + estimator_.channel(1).rejected;
    return rec;
  }

  const PlantState& state() const { return state_; }
  const ScenarioConfig& config() const { return cfg_; }

 private:
  using Vec = std::array<double, 8>;

  static Vec pack(const PlantState& s) {
    return {s.body.z, s.body.z_dot, s.body.theta, s.body.theta_dot,
            s.omega[0], s.omega[1], s.servo_integral[0], s.servo_integral[1]};
  }
  static PlantState unpack(const Vec& v) {
    PlantState s;
    s.body = {v[0], v[1], v[2], v[3]};
    s.omega = {v[4], v[5]};
    s.servo_integral = {v[6], v[7]};
    return s;
  }
  static bool finite(const PlantState& s) {
    for (double v : pack(s)) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  Vec derivative(const Vec& v) const {
    const auto s = unpack(v);
    const auto sig = signals(s, inputs_);
    const auto body = dynamics_derivative(s.body, sig.thrust[0], sig.thrust[1], cfg_.body,
                                          inputs_.external_force);
    Vec d{};
    d[0] = body.z_dot;
    d[1] = body.z_ddot;
    d[2] = body.theta_dot;
    d[3] = body.theta_ddot;
    for (std::size_t k = 0; k < 2; ++k) {
      d[4 + k] = motor_torque_balance_derivative({s.omega[k], sig.current[k]}, sig.current[k],
                                                 cfg_.motors[k]);
      d[6 + k] = inputs_.omega_ref[k] - s.omega[k];
    }
    return d;
  }

  void step_plant() {
    const double h = cfg_.dt;
    const Vec x = pack(state_);
    auto axpy = [](const Vec& a, double s, const Vec& b) {
      Vec r;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
      return r;
    };
    const Vec k1 = derivative(x);
    const Vec k2 = derivative(axpy(x, h / 2.0, k1));
    const Vec k3 = derivative(axpy(x, h / 2.0, k2));
    const Vec k4 = derivative(axpy(x, h, k3));
    Vec next;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    state_ = unpack(next);
  }

  /// Places plant and controller at the exact hover balance for the initial
  /// references. The pitch PD has no integrator, so the asymmetric ground
  /// effect leaves a small pitch offset that is solved for by fixed point.
  void init_hover() {
    const double z0 = timeline_.altitude(0.0);
    const double th_ref = timeline_.pitch(0.0);
    const auto pd = place_pd_double_integrator(cfg_.body.inertia, cfg_.control.flight.pitch_pole);
    double theta = th_ref;
    std::array<double, 2> omega{};
    double f_z_ref = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto alt = propeller_altitudes({z0, 0.0, theta, 0.0}, cfg_.body);
      const std::array<double, 2> zp{alt.z1, alt.z2};
      const double f = cfg_.body.weight() / (2.0 * std::cos(theta));
      std::array<double, 2> f_ref{};
      for (std::size_t k = 0; k < 2; ++k) {
        const double cf = cfg_.motors[k].thrust_coef;
        omega[k] = std::sqrt(f / (he_thrust_ratio(zp[k], cfg_.ge_true[k]) * cf));
        f_ref[k] = bet_thrust(omega[k], cf);
      }
      const auto wrench = wrench_from_forces(f_ref[0], f_ref[1], theta, cfg_.body.arm);
      f_z_ref = wrench.f_z;
      const double next = th_ref - wrench.t_theta / pd.kp;
      if (std::abs(next - theta) < 1e-16) {
        theta = next;
        break;
      }
      theta = next;
    }
    state_.body = {z0, 0.0, theta, 0.0};
    state_.omega = omega;
    state_.servo_integral = {0.0, 0.0};
    controller_.preset_steady(z0, theta, f_z_ref);
    // The first control update would re-derive these; hold them for step 0.
    last_control_ = controller_.step(z0, th_ref, z0, theta, cfg_.dt);
    inputs_.omega_ref = {last_control_.omega1_ref, last_control_.omega2_ref};
    hover_primed_ = true;
  }

  ScenarioConfig cfg_;
  Timeline timeline_;
  FlightController controller_;
  AttitudeEstimator estimator_;
  std::mt19937_64 rng_;
  PlantState state_{};
  PlantInputs inputs_{};
  ControlOutput last_control_{};
  AttitudeEstimate estimate_{};
  bool hover_primed_ = false;
};

inline TrajectoryRecord run_scenario(const ScenarioConfig& cfg) {
  BenchSimulation sim(cfg);
  return sim.run();
}

// ---------------------------------------------------------------------------
// Evaluation

struct ErrorStats {
  double max_abs = 0.0;  ///< largest |e|
  double signed_max = 0.0;  ///< the error value attaining max_abs
  double mean = 0.0;
  double rmsd = 0.0;
  std::size_t samples = 0;
};

template <typename Get>
ErrorStats error_stats(const TrajectoryRecord& rec, const Window& w, Get get) {
  ErrorStats s;
  double sum = 0.0, sq = 0.0;
  for (const auto& r : rec.rows) {
    if (!w.contains(r.t)) continue;
    const double e = get(r);
    sum += e;
    sq += e * e;
    if (std::abs(e) > s.max_abs) {
      s.max_abs = std::abs(e);
      s.signed_max = e;
    }
    ++s.samples;
  }
  if (s.samples > 0) {
    s.mean = sum / static_cast<double>(s.samples);
    s.rmsd = std::sqrt(sq / static_cast<double>(s.samples));
  }
  return s;
}

struct ScenarioSummary {
  ErrorStats altitude_hover;     ///< e_z over the hover window
  ErrorStats altitude_steady;    ///< e_z over hover and maneuver windows
  ErrorStats pitch_maneuver;     ///< e_theta over the maneuver window
  bool altitude_claim = false;   ///< |e_z| below tolerance in the hover window
  bool pitch_claim = false;      ///< |e_theta| below tolerance in both windows
  double pitch_max_both = 0.0;
};

inline ScenarioSummary summarize(const TrajectoryRecord& rec, const ScenarioConfig& cfg) {
  const auto& ev = cfg.evaluation;
  ScenarioSummary s;
  auto ez = [](const TrajectoryRow& r) { return r.e_z; };
  auto et = [](const TrajectoryRow& r) { return r.e_theta; };
  s.altitude_hover = error_stats(rec, ev.hover, ez);
  s.altitude_steady = error_stats(rec, Window{ev.hover.begin, ev.maneuver.end}, ez);
  s.pitch_maneuver = error_stats(rec, ev.maneuver, et);
  const auto pitch_hover = error_stats(rec, ev.hover, et);
  s.pitch_max_both = std::max(pitch_hover.max_abs, s.pitch_maneuver.max_abs);
  s.altitude_claim = s.altitude_hover.samples > 0 && s.altitude_hover.max_abs < ev.altitude_tolerance;
  s.pitch_claim = s.pitch_maneuver.samples > 0 && s.pitch_max_both < ev.pitch_tolerance;
  return s;
}

// ---------------------------------------------------------------------------
// Parameter-error sweep

struct CoefficientScaling {
  double c_a = 1.0;  ///< nominal C_a = c_a * true C_a
  double c_b = 1.0;
};

struct SweepCase {
  CoefficientScaling scaling;
  ErrorStats altitude;  ///< steady windows (hover + maneuver)
  ErrorStats pitch;     ///< maneuver window
};

struct SweepReport {
  std::vector<SweepCase> cases;
};

inline std::vector<CoefficientScaling> coefficient_sweep_scalings() {
  return {{1.0, 1.0}, {1.05, 1.05}, {1.05, 0.95}, {0.95, 1.05}, {0.95, 0.95}};
}

inline SweepCase run_sweep_case(const ScenarioConfig& base, CoefficientScaling s,
                                std::size_t index) {
  ScenarioConfig cfg = base;
  for (std::size_t k = 0; k < 2; ++k) {
    cfg.ge_nominal[k] = base.ge_true[k];
    cfg.ge_nominal[k].c_a *= s.c_a;
    cfg.ge_nominal[k].c_b *= s.c_b;
  }
  cfg.noise.seed = base.noise.seed + index;
  const auto rec = run_scenario(cfg);
  const auto& ev = cfg.evaluation;
  SweepCase out;
  out.scaling = s;
  out.altitude = error_stats(rec, Window{ev.hover.begin, ev.maneuver.end},
                             [](const TrajectoryRow& r) { return r.e_z; });
  out.pitch = error_stats(rec, ev.maneuver, [](const TrajectoryRow& r) { return r.e_theta; });
  return out;
}

/// Runs every scaling case against an unscaled truth. Cases are independent;
/// with `parallel` set they run on separate threads, and the report order
/// always follows `scalings`.
inline SweepReport run_parameter_error_sweep(const ScenarioConfig& cfg,
                                             const std::vector<CoefficientScaling>& scalings,
                                             bool parallel = false) {
  SweepReport rep;
  rep.cases.resize(scalings.size());
  if (parallel) {
    std::vector<std::future<SweepCase>> jobs;
    jobs.reserve(scalings.size());
    for (std::size_t i = 0; i < scalings.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, run_sweep_case, std::cref(cfg), scalings[i], i));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) rep.cases[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < scalings.size(); ++i) {
      rep.cases[i] = run_sweep_case(cfg, scalings[i], i);
    }
  }
  return rep;
}

}  // namespace gebench
