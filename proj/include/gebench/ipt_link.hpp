#pragma once

// Resonant two-coil inductive link: altitude -> coupling -> efficiency.
//
// With both sides tuned to resonance and an optimal load, the link efficiency
// depends only on the figure of merit k^2 Q1 Q2:
//
//   eta = k^2 Q1 Q2 / (1 + sqrt(1 + k^2 Q1 Q2))^2

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gebench {

struct IptCircuitParams {
  double frequency = 85.0e3;  ///< operating frequency [Hz]
  double r1 = 108.0e-3;       ///< [Ohm]
  double r2 = 32.5e-3;
  double l1 = 236.0e-6;       ///< [H]
  double l2 = 18.9e-6;

  double angular_frequency() const { return 2.0 * std::numbers::pi * frequency; }
  double q1() const { return angular_frequency() * l1 / r1; }
  double q2() const { return angular_frequency() * l2 / r2; }
};

inline std::vector<std::string> check_ipt_circuit(const IptCircuitParams& c) {
  std::vector<std::string> out;
  auto pos = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(std::string(name) + ": must be > 0, got " + std::to_string(v));
  };
  pos(c.frequency, "frequency");
  pos(c.r1, "r1");
  pos(c.r2, "r2");
  pos(c.l1, "l1");
  pos(c.l2, "l2");
  if (out.empty()) {
    if (!(c.q1() > 1.0)) out.push_back("q1: quality factor must exceed 1");
    if (!(c.q2() > 1.0)) out.push_back("q2: quality factor must exceed 1");
  }
  return out;
}

struct CouplingAnchor {
  double z = 0.0;  ///< coil separation proxy: bench altitude [m]
  double k = 0.0;
};

struct CouplingLookup {
  double k = 0.0;
  bool clamped = false;  ///< altitude was outside the anchor range
};

/// Piecewise-linear k(z) through anchor points; clamps outside the range.
class CouplingMap {
 public:
  CouplingMap() : CouplingMap({{0.27, 0.13}, {0.30, 0.10}, {0.33, 0.07}}) {}

  explicit CouplingMap(std::vector<CouplingAnchor> anchors) : anchors_(std::move(anchors)) {
    if (anchors_.size() < 2) throw std::invalid_argument("coupling map needs at least two anchors");
    std::sort(anchors_.begin(), anchors_.end(),
              [](const CouplingAnchor& a, const CouplingAnchor& b) { return a.z < b.z; });
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      const auto& a = anchors_[i];
      if (!(a.k > 0.0 && a.k < 1.0)) {
        throw std::invalid_argument("coupling anchor " + std::to_string(i) + ": k must lie in (0, 1)");
      }
      if (i > 0 && !(a.z > anchors_[i - 1].z && a.k < anchors_[i - 1].k)) {
        throw std::invalid_argument(
            "coupling anchors must be strictly decreasing in k as z increases");
      }
    }
  }

  const std::vector<CouplingAnchor>& anchors() const { return anchors_; }
  double z_min() const { return anchors_.front().z; }
  double z_max() const { return anchors_.back().z; }

  CouplingLookup lookup(double z) const {
    constexpr double kSlack = 1e-12;  // absorbs rounding in hover +- error
    if (z <= z_min()) return {anchors_.front().k, z < z_min() - kSlack};
    if (z >= z_max()) return {anchors_.back().k, z > z_max() + kSlack};
    auto hi = std::upper_bound(anchors_.begin(), anchors_.end(), z,
                               [](double v, const CouplingAnchor& a) { return v < a.z; });
    auto lo = hi - 1;
    const double t = (z - lo->z) / (hi->z - lo->z);
    return {lo->k + t * (hi->k - lo->k), false};
  }

 private:
  std::vector<CouplingAnchor> anchors_;
};

inline CouplingLookup coupling_from_altitude(double z, const CouplingMap& map) {
  return map.lookup(z);
}

/// Maximum efficiency of the tuned link at coupling k.
inline double max_efficiency(double k, const IptCircuitParams& c) {
  if (!(k > 0.0 && k < 1.0)) throw std::domain_error("coupling must lie in (0, 1)");
  const double fom = k * k * c.q1() * c.q2();
  const double den = 1.0 + std::sqrt(1.0 + fom);
  return fom / (den * den);
}

struct EfficiencyBand {
  double eta_min = 0.0;
  double eta_max = 0.0;
  bool clamped = false;  ///< part of the band fell outside the coupling map
};

/// Efficiency range when the hover altitude deviates by up to +-z_error.
inline EfficiencyBand efficiency_band(double z_error, double hover_z, const CouplingMap& map,
                                      const IptCircuitParams& circuit) {
  const auto lo = map.lookup(hover_z - std::abs(z_error));
  const auto hi = map.lookup(hover_z + std::abs(z_error));
  const double a = max_efficiency(lo.k, circuit);
  const double b = max_efficiency(hi.k, circuit);
  return {std::min(a, b), std::max(a, b), lo.clamped || hi.clamped};
}

}  // namespace gebench
