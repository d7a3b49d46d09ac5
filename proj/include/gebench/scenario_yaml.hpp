#pragma once

// YAML scenario files. Every key is optional and falls back to the built-in
// bench defaults; unknown keys are errors so typos do not pass silently.
// Physical values accept a unit string ("66.4 mNm/A") or a bare SI number.
//
//   name: bench
//   body: {mass, drag, inertia, rotational_viscosity, arm, gravity}
//   motors: [{torque_coef, inertia, viscosity, counter_torque_coef,
//             coulomb_torque, thrust_coef}, x2]
//   ground_effect: {rotor_radius, true: [{c_a, c_b}, x2], nominal: [...]}
//   control: {altitude_pole, pitch_pole, altitude_rolloff, pitch_rolloff,
//             thrust_limit_factor, servo_bandwidth, enabled, feedback,
//             dob: {enabled, cutoff, input_model}}
//   estimator: {forgetting, initial_altitude, initial_covariance,
//               altitude_ceiling, cog_offset, i_m_inf: [auto|A, x2], reference}
//   ipt: {frequency, r1, r2, l1, l2, coupling: [{z, k}, ...]}
//   timeline: {hover_altitude, takeoff_ramp, start_in_hover, pitch_shape,
//              pitch_profile: [[t, theta], ...]}
//   sim: {dt, duration}
//   noise: {current_sigma, seed}
//   disturbance: {force, start_time}
//   evaluation: {hover_window: [t0, t1], maneuver_window: [t0, t1],
//                altitude_tolerance, pitch_tolerance}

#include <filesystem>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "gebench/scenario.hpp"
#include "gebench/units.hpp"

namespace gebench {

namespace detail {

/// Child lookup that never inserts and is falsy when the key is absent.
inline YAML::Node get(const YAML::Node& n, const char* key) {
  if (n && n.IsMap()) {
    for (const auto& kv : n) {
      if (kv.first.Scalar() == key) return kv.second;
    }
  }
  return YAML::Node(YAML::NodeType::Undefined);
}

class YamlReader {
 public:
  std::vector<std::string> errors;

  void keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!n) return;
    if (!n.IsMap()) {
      errors.push_back(path + ": expected a mapping");
      return;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      if (!ok.count(k)) errors.push_back(join(path, k) + ": unknown key");
    }
  }

  void quantity(const YAML::Node& n, const std::string& path, const char* key, const char* unit,
                double& out) {
    const auto v = get(n, key);
    if (!v) return;
    const std::string where = join(path, key);
    if (!v.IsScalar()) {
      errors.push_back(where + ": expected a value");
      return;
    }
    try {
      out = units::parse_quantity(v.Scalar(), unit);
    } catch (const std::exception& e) {
      errors.push_back(where + ": " + e.what());
    }
  }

  void number(const YAML::Node& n, const std::string& path, const char* key, double& out) {
    quantity(n, path, key, "", out);
  }

  template <typename T>
  void scalar(const YAML::Node& n, const std::string& path, const char* key, T& out) {
    const auto v = get(n, key);
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const std::exception&) {
      errors.push_back(join(path, key) + ": invalid value '" + (v.IsScalar() ? v.Scalar() : "?") + "'");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline void read_ge_pair(YamlReader& r, const YAML::Node& list, const std::string& path,
                         std::array<PropellerGeParams, 2>& out) {
  if (!list) return;
  if (!list.IsSequence() || list.size() != 2) {
    r.errors.push_back(path + ": expected a list of two entries");
    return;
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    r.keys(list[k], p, {"c_a", "c_b"});
    r.number(list[k], p, "c_a", out[k].c_a);
    r.number(list[k], p, "c_b", out[k].c_b);
  }
}

inline Window read_window(YamlReader& r, const YAML::Node& n, const std::string& path, Window w) {
  if (!n) return w;
  if (!n.IsSequence() || n.size() != 2) {
    r.errors.push_back(path + ": expected [begin, end]");
    return w;
  }
  try {
    w.begin = units::parse_quantity(n[0].Scalar(), "s");
    w.end = units::parse_quantity(n[1].Scalar(), "s");
  } catch (const std::exception& e) {
    r.errors.push_back(path + ": " + e.what());
  }
  return w;
}

}  // namespace detail

/// Builds a scenario from a YAML document. Throws ConfigError with one
/// message per offending field; the result also passes validate().
inline ScenarioConfig scenario_from_yaml(const YAML::Node& root) {
  ScenarioConfig c = bench_scenario();
  detail::YamlReader r;
  if (root && !root.IsNull() && !root.IsMap()) throw ConfigError("scenario: expected a mapping");
  if (!root || root.IsNull()) return c;
  r.keys(root, "", {"name", "body", "motors", "ground_effect", "control", "estimator", "ipt",
                    "timeline", "sim", "noise", "disturbance", "evaluation"});
  r.scalar(root, "", "name", c.name);

  const auto body = detail::get(root, "body");
  r.keys(body, "body", {"mass", "drag", "inertia", "rotational_viscosity", "arm", "gravity"});
  r.quantity(body, "body", "mass", "kg", c.body.mass);
  r.quantity(body, "body", "drag", "N s/m", c.body.drag);
  r.quantity(body, "body", "inertia", "kg m^2", c.body.inertia);
  r.quantity(body, "body", "rotational_viscosity", "N m s/rad", c.body.rot_viscosity);
  r.quantity(body, "body", "arm", "m", c.body.arm);
  r.quantity(body, "body", "gravity", "m/s^2", c.body.gravity);

  if (const auto motors = detail::get(root, "motors")) {
    if (!motors.IsSequence() || motors.size() != 2) {
      r.errors.push_back("motors: expected a list of two motors");
    } else {
      for (std::size_t k = 0; k < 2; ++k) {
        const std::string p = "motors[" + std::to_string(k) + "]";
        const auto m = motors[k];
        auto& o = c.motors[k];
        r.keys(m, p, {"torque_coef", "inertia", "viscosity", "counter_torque_coef",
                      "coulomb_torque", "thrust_coef"});
        r.quantity(m, p, "torque_coef", "N m/A", o.torque_coef);
        r.quantity(m, p, "inertia", "kg m^2", o.inertia);
        r.quantity(m, p, "viscosity", "N m s/rad", o.viscosity);
        r.quantity(m, p, "counter_torque_coef", "N m s^2/rad^2", o.counter_torque_coef);
        r.quantity(m, p, "coulomb_torque", "N m", o.coulomb_torque);
        r.quantity(m, p, "thrust_coef", "N s^2/rad^2", o.thrust_coef);
      }
    }
  }

  if (const auto ge = detail::get(root, "ground_effect")) {
    r.keys(ge, "ground_effect", {"rotor_radius", "true", "nominal"});
    double radius = c.ge_true[0].rotor_radius;
    r.quantity(ge, "ground_effect", "rotor_radius", "m", radius);
    detail::read_ge_pair(r, detail::get(ge, "true"), "ground_effect.true", c.ge_true);
    c.ge_nominal = c.ge_true;
    detail::read_ge_pair(r, detail::get(ge, "nominal"), "ground_effect.nominal", c.ge_nominal);
    for (std::size_t k = 0; k < 2; ++k) {
      c.ge_true[k].rotor_radius = radius;
      c.ge_nominal[k].rotor_radius = radius;
    }
  }

  if (const auto ctl = detail::get(root, "control")) {
    auto& f = c.control.flight;
    r.keys(ctl, "control", {"altitude_pole", "pitch_pole", "altitude_rolloff", "pitch_rolloff",
                            "thrust_limit_factor", "servo_bandwidth", "enabled", "feedback", "dob"});
    r.quantity(ctl, "control", "altitude_pole", "rad/s", f.altitude_pole);
    r.quantity(ctl, "control", "pitch_pole", "rad/s", f.pitch_pole);
    r.quantity(ctl, "control", "altitude_rolloff", "rad/s", f.altitude_rolloff);
    r.quantity(ctl, "control", "pitch_rolloff", "rad/s", f.pitch_rolloff);
    r.number(ctl, "control", "thrust_limit_factor", f.thrust_limit_factor);
    r.quantity(ctl, "control", "servo_bandwidth", "rad/s", c.control.servo_bandwidth);
    r.scalar(ctl, "control", "enabled", c.control.enabled);
    std::string fb = c.control.feedback == Feedback::kTruth ? "truth" : "estimate";
    r.scalar(ctl, "control", "feedback", fb);
    if (fb == "truth") c.control.feedback = Feedback::kTruth;
    else if (fb == "estimate") c.control.feedback = Feedback::kEstimate;
    else r.errors.push_back("control.feedback: expected 'truth' or 'estimate'");
    if (const auto dob = detail::get(ctl, "dob")) {
      r.keys(dob, "control.dob", {"enabled", "cutoff", "input_model"});
      r.scalar(dob, "control.dob", "enabled", f.dob.enabled);
      r.quantity(dob, "control.dob", "cutoff", "rad/s", f.dob.cutoff);
      r.scalar(dob, "control.dob", "input_model", c.control.dob_input_model);
    }
  }

  if (const auto est = detail::get(root, "estimator")) {
    auto& e = c.estimator;
    r.keys(est, "estimator", {"forgetting", "initial_altitude", "initial_covariance",
                              "altitude_ceiling", "cog_offset", "i_m_inf", "reference"});
    r.number(est, "estimator", "forgetting", e.forgetting);
    r.quantity(est, "estimator", "initial_altitude", "m", e.initial_altitude);
    r.number(est, "estimator", "initial_covariance", e.initial_covariance);
    r.quantity(est, "estimator", "altitude_ceiling", "m", e.altitude_ceiling);
    r.quantity(est, "estimator", "cog_offset", "m", e.cog_offset);
    if (const auto i = detail::get(est, "i_m_inf")) {
      if (!i.IsSequence() || i.size() != 2) {
        r.errors.push_back("estimator.i_m_inf: expected a list of two currents or 'auto'");
      } else {
        for (std::size_t k = 0; k < 2; ++k) {
          const std::string s = i[k].Scalar();
          if (s == "auto") {
            e.i_m_inf[k] = std::numeric_limits<double>::quiet_NaN();
            continue;
          }
          try {
            e.i_m_inf[k] = units::parse_quantity(s, "A");
          } catch (const std::exception& ex) {
            r.errors.push_back("estimator.i_m_inf[" + std::to_string(k) + "]: " + ex.what());
          }
        }
      }
    }
    std::string ref = e.reference == CurrentReference::kExact ? "exact" : "approximate";
    r.scalar(est, "estimator", "reference", ref);
    if (ref == "exact") e.reference = CurrentReference::kExact;
    else if (ref == "approximate") e.reference = CurrentReference::kApproximate;
    else r.errors.push_back("estimator.reference: expected 'exact' or 'approximate'");
  }

  if (const auto ipt = detail::get(root, "ipt")) {
    r.keys(ipt, "ipt", {"frequency", "r1", "r2", "l1", "l2", "coupling"});
    r.quantity(ipt, "ipt", "frequency", "Hz", c.ipt.frequency);
    r.quantity(ipt, "ipt", "r1", "Ohm", c.ipt.r1);
    r.quantity(ipt, "ipt", "r2", "Ohm", c.ipt.r2);
    r.quantity(ipt, "ipt", "l1", "H", c.ipt.l1);
    r.quantity(ipt, "ipt", "l2", "H", c.ipt.l2);
    if (const auto cp = detail::get(ipt, "coupling")) {
      std::vector<CouplingAnchor> anchors;
      if (!cp.IsSequence()) {
        r.errors.push_back("ipt.coupling: expected a list of {z, k}");
      } else {
        for (std::size_t i = 0; i < cp.size(); ++i) {
          const std::string p = "ipt.coupling[" + std::to_string(i) + "]";
          CouplingAnchor a;
          r.keys(cp[i], p, {"z", "k"});
          r.quantity(cp[i], p, "z", "m", a.z);
          r.number(cp[i], p, "k", a.k);
          anchors.push_back(a);
        }
        try {
          c.coupling = CouplingMap(anchors);
        } catch (const std::exception& e) {
          r.errors.push_back(std::string("ipt.coupling: ") + e.what());
        }
      }
    }
  }

  if (const auto tl = detail::get(root, "timeline")) {
    auto& t = c.timeline;
    r.keys(tl, "timeline", {"hover_altitude", "takeoff_ramp", "start_in_hover", "pitch_shape",
                            "pitch_profile"});
    r.quantity(tl, "timeline", "hover_altitude", "m", t.hover_altitude);
    r.quantity(tl, "timeline", "takeoff_ramp", "s", t.takeoff_ramp);
    r.scalar(tl, "timeline", "start_in_hover", t.start_in_hover);
    std::string shape = t.pitch_shape == ProfileShape::kSmooth ? "smooth" : "linear";
    r.scalar(tl, "timeline", "pitch_shape", shape);
    if (shape == "smooth") t.pitch_shape = ProfileShape::kSmooth;
    else if (shape == "linear") t.pitch_shape = ProfileShape::kLinear;
    else r.errors.push_back("timeline.pitch_shape: expected 'smooth' or 'linear'");
    if (const auto pp = detail::get(tl, "pitch_profile")) {
      t.pitch_profile.clear();
      if (!pp.IsSequence()) r.errors.push_back("timeline.pitch_profile: expected a list of [t, theta]");
      for (std::size_t i = 0; pp.IsSequence() && i < pp.size(); ++i) {
        const std::string p = "timeline.pitch_profile[" + std::to_string(i) + "]";
        if (!pp[i].IsSequence() || pp[i].size() != 2) {
          r.errors.push_back(p + ": expected [t, theta]");
          continue;
        }
        try {
          t.pitch_profile.push_back({units::parse_quantity(pp[i][0].Scalar(), "s"),
                                     units::parse_quantity(pp[i][1].Scalar(), "rad")});
        } catch (const std::exception& e) {
          r.errors.push_back(p + ": " + e.what());
        }
      }
    }
  }

  if (const auto sim = detail::get(root, "sim")) {
    r.keys(sim, "sim", {"dt", "duration"});
    r.quantity(sim, "sim", "dt", "s", c.dt);
    r.quantity(sim, "sim", "duration", "s", c.duration);
  }
  if (const auto noise = detail::get(root, "noise")) {
    r.keys(noise, "noise", {"current_sigma", "seed"});
    r.quantity(noise, "noise", "current_sigma", "A", c.noise.current_sigma);
    r.scalar(noise, "noise", "seed", c.noise.seed);
  }
  if (const auto d = detail::get(root, "disturbance")) {
    r.keys(d, "disturbance", {"force", "start_time"});
    r.quantity(d, "disturbance", "force", "N", c.disturbance.force);
    r.quantity(d, "disturbance", "start_time", "s", c.disturbance.start_time);
  }
  if (const auto ev = detail::get(root, "evaluation")) {
    r.keys(ev, "evaluation", {"hover_window", "maneuver_window", "altitude_tolerance",
                              "pitch_tolerance"});
    c.evaluation.hover = detail::read_window(r, detail::get(ev, "hover_window"), "evaluation.hover_window",
                                             c.evaluation.hover);
    c.evaluation.maneuver = detail::read_window(r, detail::get(ev, "maneuver_window"),
                                                "evaluation.maneuver_window", c.evaluation.maneuver);
    r.quantity(ev, "evaluation", "altitude_tolerance", "m", c.evaluation.altitude_tolerance);
    r.quantity(ev, "evaluation", "pitch_tolerance", "rad", c.evaluation.pitch_tolerance);
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  require_valid(c);
  return c;
}

inline ScenarioConfig scenario_from_yaml_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("yaml: ") + e.what());
  }
  return scenario_from_yaml(root);
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError(path.string() + ": cannot open");
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return scenario_from_yaml(root);
}

}  // namespace gebench
