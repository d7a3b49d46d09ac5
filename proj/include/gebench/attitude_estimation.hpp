#pragma once

// Altitude and pitch from motor currents.
//
// Each propeller channel runs a scalar forgetting-factor RLS on the
// linear-in-parameter form of the current model
//
//   I_m (1 + C_a x) = I_m_inf,   x = exp(-C_b z / R)
//   y = I_m_inf - I_m,  phi = C_a I_m,  y = phi x
//
// and maps the estimate back through z = -(R / C_b) ln x. The two propeller
// altitudes then give the body altitude and pitch.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "gebench/ge_models.hpp"

namespace gebench {

struct RlsChannel {
  double x_hat = 1.0;           ///< estimate of exp(-C_b z / R)
  double covariance = 10.0;     ///< P
  double forgetting = 0.9985;   ///< lambda
  double i_m_inf = 12.39;       ///< out-of-ground-effect reference current [A]
  double altitude_ceiling = 1.02;  ///< z_max defining the lower clamp of x_hat [m]
  std::uint64_t rejected = 0;   ///< non-positive samples skipped

  double x_min(const PropellerGeParams& ge) const {
    return std::exp(-ge.c_b * altitude_ceiling / ge.rotor_radius);
  }
};

/// Channel primed at an altitude prior.
inline RlsChannel make_rls_channel(double i_m_inf, const PropellerGeParams& ge,
                                   double initial_altitude, double initial_covariance,
                                   double forgetting, double altitude_ceiling) {
  if (!(forgetting > 0.0 && forgetting <= 1.0)) {
    throw std::invalid_argument("forgetting factor must lie in (0, 1]");
  }
  if (!(initial_covariance > 0.0)) throw std::invalid_argument("initial covariance must be > 0");
  RlsChannel ch;
  ch.x_hat = std::exp(-ge.c_b * initial_altitude / ge.rotor_radius);
  ch.covariance = initial_covariance;
  ch.forgetting = forgetting;
  ch.i_m_inf = i_m_inf;
  ch.altitude_ceiling = altitude_ceiling;
  return ch;
}

/// One RLS step. Non-positive or non-finite samples leave the estimate
/// untouched and bump the rejection counter.
inline RlsChannel rls_update(RlsChannel ch, double i_m_sample, const PropellerGeParams& ge) {
  if (!(i_m_sample > 0.0) || !std::isfinite(i_m_sample)) {
    ++ch.rejected;
    return ch;
  }
  const double phi = ge.c_a * i_m_sample;
  const double y = ch.i_m_inf - i_m_sample;
  const double lam = ch.forgetting;
  const double gain = ch.covariance * phi / (lam + phi * phi * ch.covariance);
  ch.x_hat += gain * (y - phi * ch.x_hat);
  ch.covariance = (ch.covariance - gain * phi * ch.covariance) / lam;
  const double lo = ch.x_min(ge);
  if (ch.x_hat < lo) ch.x_hat = lo;
  if (ch.x_hat > 1.0) ch.x_hat = 1.0;
  return ch;
}

struct ChannelAltitude {
  double altitude = 0.0;
  bool saturated = false;  ///< estimate sits on a clamp boundary
};

inline ChannelAltitude channel_altitude(const RlsChannel& ch, const PropellerGeParams& ge) {
  const double lo = ch.x_min(ge);
  ChannelAltitude out;
  out.altitude = -(ge.rotor_radius / ge.c_b) * std::log(ch.x_hat);
  out.saturated = ch.x_hat >= 1.0 || ch.x_hat <= lo;
  if (out.altitude < 0.0) out.altitude = 0.0;
  return out;
}

struct ChannelFlags {
  bool saturated = false;
  bool rejected = false;  ///< the latest sample was rejected
};

struct AttitudeEstimate {
  double z_hat = 0.0;
  double theta_hat = 0.0;
  double z1_hat = 0.0;
  double z2_hat = 0.0;
  bool theta_saturated = false;
  std::array<ChannelFlags, 2> channels{};
};

/// z = (z1 + z2) / 2, theta = asin((z1 - z2) / (2 l)); saturates at +-pi/2.
inline AttitudeEstimate combine_attitude(double z1, double z2, double arm) {
  if (!(arm > 0.0)) throw std::invalid_argument("pitch arm must be positive");
  AttitudeEstimate e;
  e.z1_hat = z1;
  e.z2_hat = z2;
  e.z_hat = 0.5 * (z1 + z2);
  const double s = (z1 - z2) / (2.0 * arm);
  if (s > 1.0 || s < -1.0) {
    e.theta_hat = std::copysign(std::numbers::pi / 2.0, s);
    e.theta_saturated = true;
  } else {
    e.theta_hat = std::asin(s);
  }
  return e;
}

struct EstimatorConfig {
  double forgetting = 0.9985;
  double initial_altitude = 0.3;    ///< prior for x_hat [m]
  double initial_covariance = 10.0;
  double altitude_ceiling = 1.02;   ///< default 3 R
  double cog_offset = 0.0;          ///< COG height above the propeller plane [m]
  double arm = 0.63;                ///< l [m]
  std::array<double, 2> i_m_inf{12.39, 13.06};
  std::array<PropellerGeParams, 2> ge{};  ///< nominal coefficients
};

/// Two-channel streaming estimator. Single writer; copy `latest()` to share.
class AttitudeEstimator {
 public:
  explicit AttitudeEstimator(const EstimatorConfig& cfg) : cfg_(cfg) {
    for (std::size_t k = 0; k < 2; ++k) {
      cfg_.ge[k].validate();
      channels_[k] = make_rls_channel(cfg.i_m_inf[k], cfg.ge[k], cfg.initial_altitude,
                                      cfg.initial_covariance, cfg.forgetting,
                                      cfg.altitude_ceiling);
    }
    latest_ = combine_attitude(cfg.initial_altitude, cfg.initial_altitude, cfg.arm);
  }

  AttitudeEstimate step(double t, double i1, double i2) {
    if (has_time_ && t < last_time_) {
      throw std::invalid_argument("estimator samples must have non-decreasing timestamps");
    }
    has_time_ = true;
    last_time_ = t;

    const std::array<double, 2> samples{i1, i2};
    std::array<ChannelAltitude, 2> alt{};
    std::array<bool, 2> rejected{};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto before = channels_[k].rejected;
      channels_[k] = rls_update(channels_[k], samples[k], cfg_.ge[k]);
      rejected[k] = channels_[k].rejected != before;
      alt[k] = channel_altitude(channels_[k], cfg_.ge[k]);
    }
    latest_ = combine_attitude(alt[0].altitude, alt[1].altitude, cfg_.arm);
    latest_.z_hat += cfg_.cog_offset;
    for (std::size_t k = 0; k < 2; ++k) {
      latest_.channels[k] = {alt[k].saturated, rejected[k]};
    }
    return latest_;
  }

  const AttitudeEstimate& latest() const { return latest_; }
  const RlsChannel& channel(std::size_t k) const { return channels_.at(k); }
  const EstimatorConfig& config() const { return cfg_; }

 private:
  EstimatorConfig cfg_;
  std::array<RlsChannel, 2> channels_{};
  AttitudeEstimate latest_{};
  double last_time_ = 0.0;
  bool has_time_ = false;
};

/// Free-function form used by batch tools.
inline AttitudeEstimate estimator_step(AttitudeEstimator& est, double t, double i1, double i2) {
  return est.step(t, i1, i2);
}

}  // namespace gebench
