#pragma once

// Offline identification of the current-ratio model
//
//   i_dc(z) = I_inf / (1 + C_a exp(-C_b z / R))
//
// from per-altitude current logs: take the DC component of each log, then fit
// (C_a, C_b, I_inf) by damped Gauss-Newton from several starting points.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gebench {

struct CurrentTrace {
  double sample_rate = 1000.0;  ///< [Hz]
  std::vector<double> samples;  ///< [A]
  double altitude = 0.0;        ///< label [m]
};

struct DcExtraction {
  double value = 0.0;          ///< DC current [A]
  double fundamental = 0.0;    ///< detected fundamental [Hz]; 0 when none
  std::size_t periods = 0;     ///< whole periods averaged
  std::size_t window = 0;      ///< samples averaged
};

namespace detail {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
struct FftwBufferDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

inline double hann(std::size_t n, std::size_t len) {
  if (len < 2) return 1.0;
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                              static_cast<double>(len - 1));
}

/// |sum w_n x_n exp(-i 2 pi f n / fs)| for the Hann-windowed signal.
inline double windowed_dtft_magnitude(const std::vector<double>& x, double f, double fs) {
  std::complex<double> acc{0.0, 0.0};
  const double dphi = -2.0 * std::numbers::pi * f / fs;
  const std::complex<double> rot{std::cos(dphi), std::sin(dphi)};
  std::complex<double> ph{1.0, 0.0};
  for (std::size_t n = 0; n < x.size(); ++n) {
    acc += hann(n, x.size()) * x[n] * ph;
    ph *= rot;
    if ((n & 1023u) == 1023u) ph /= std::abs(ph);
  }
  return std::abs(acc);
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Fundamental {
  double frequency = 0.0;
  double amplitude = 0.0;
};

/// Dominant non-DC spectral line of a mean-removed signal.
inline Fundamental dominant_line(const std::vector<double>& centered, double fs) {
  const std::size_t n = centered.size();
  const std::size_t pad = 8;
  const std::size_t nfft = next_pow2(n * pad);
  std::unique_ptr<double, FftwBufferDeleter> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * nfft)));
  std::unique_ptr<fftw_complex, FftwBufferDeleter> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (nfft / 2 + 1))));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), out.get(), FFTW_ESTIMATE));

  double wsum = 0.0;
  for (std::size_t i = 0; i < nfft; ++i) {
    const double w = i < n ? hann(i, n) : 0.0;
    in.get()[i] = i < n ? w * centered[i] : 0.0;
    wsum += w;
  }
  fftw_execute(plan.get());

  auto mag = [&](std::size_t k) { return std::hypot(out.get()[k][0], out.get()[k][1]); };
  // Skip the Hann main lobe around DC (two native bins).
  const double native_bin = fs / static_cast<double>(n);
  const double padded_bin = fs / static_cast<double>(nfft);
  const auto k0 = static_cast<std::size_t>(std::ceil(2.0 * native_bin / padded_bin));
  std::size_t best = 0;
  double best_mag = 0.0;
  for (std::size_t k = std::max<std::size_t>(k0, 1); k + 1 < nfft / 2 + 1; ++k) {
    const double m = mag(k);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  if (best == 0) return {};

  // Parabolic interpolation on the padded spectrum, then a golden-section
  // polish on the exact windowed DTFT.
  const double a = mag(best - 1), b = mag(best), c = mag(best + 1);
  const double den = a - 2.0 * b + c;
  const double offs = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
  double lo = (static_cast<double>(best) + offs - 1.0) * padded_bin;
  double hi = (static_cast<double>(best) + offs + 1.0) * padded_bin;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = windowed_dtft_magnitude(centered, x1, fs);
  double f2 = windowed_dtft_magnitude(centered, x2, fs);
  for (int it = 0; it < 60 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = windowed_dtft_magnitude(centered, x2, fs);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = windowed_dtft_magnitude(centered, x1, fs);
    }
  }
  const double f = 0.5 * (lo + hi);
  return {f, 2.0 * windowed_dtft_magnitude(centered, f, fs) / wsum};
}

}  // namespace detail

/// Zero-frequency component of a current log. When a clear periodic
/// component is present the mean is taken over a whole number of its periods,
/// otherwise over the full log.
inline DcExtraction extract_dc(const CurrentTrace& trace) {
  const auto& x = trace.samples;
  if (x.empty()) throw std::invalid_argument("extract_dc: empty trace");
  if (!(trace.sample_rate > 0.0)) throw std::invalid_argument("extract_dc: sample rate must be > 0");

  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  DcExtraction out{mean, 0.0, 0, x.size()};
  if (x.size() < 16) return out;

  std::vector<double> centered(x.size());
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    centered[i] = x[i] - mean;
    var += centered[i] * centered[i];
  }
  const double rms = std::sqrt(var / n);
  if (rms <= 1e-12 * std::max(1.0, std::abs(mean))) return out;

  const auto line = detail::dominant_line(centered, trace.sample_rate);
  // A line counts as the fundamental when it carries most of the AC power.
  if (!(line.frequency > 0.0) || line.amplitude < 0.5 * std::sqrt(2.0) * rms) return out;

  const double duration = n / trace.sample_rate;
  const auto periods = static_cast<std::size_t>(std::floor(duration * line.frequency));
  if (periods < 1) return out;
  const auto window = static_cast<std::size_t>(
      std::llround(static_cast<double>(periods) * trace.sample_rate / line.frequency));
  const std::size_t w = std::clamp<std::size_t>(window, 1, x.size());
  out.value = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(w), 0.0) /
              static_cast<double>(w);
  out.fundamental = line.frequency;
  out.periods = periods;
  out.window = w;
  return out;
}

struct CurrentPoint {
  double z = 0.0;       ///< [m]
  double i_dc = 0.0;    ///< [A]
  double weight = 1.0;  ///< number of merged observations
};

struct FitResult {
  double c_a = 0.0;
  double c_b = 0.0;
  double i_m_inf = 0.0;
  double residual_rms = 0.0;
  std::vector<double> residuals;  ///< i_dc - model, per input point
  int iterations = 0;
  bool converged = false;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, FitResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const FitResult& best_so_far() const { return best_; }

 private:
  FitResult best_;
};

struct FitOptions {
  bool fix_i_inf = false;
  double i_inf_value = 0.0;  ///< used when fix_i_inf is set
  int max_iterations = 200;
  int starts = 5;
  double c_a_box[2] = {0.5, 5.0};
  double c_b_box[2] = {1.0, 6.0};
};

/// Merges observations at identical altitudes into weighted points.
inline std::vector<CurrentPoint> collapse_duplicates(const std::vector<CurrentPoint>& points) {
  std::map<double, CurrentPoint> merged;
  for (const auto& p : points) {
    auto [it, fresh] = merged.try_emplace(p.z, CurrentPoint{p.z, 0.0, 0.0});
    auto& m = it->second;
    m.i_dc = (m.i_dc * m.weight + p.i_dc * p.weight) / (m.weight + p.weight);
    m.weight += p.weight;
  }
  std::vector<CurrentPoint> out;
  out.reserve(merged.size());
  for (const auto& [z, p] : merged) out.push_back(p);
  return out;
}

namespace detail {

inline double ge_current_model(double z, double c_a, double c_b, double i_inf, double r) {
  return i_inf / (1.0 + c_a * std::exp(-c_b * z / r));
}

/// Best I_inf for fixed (C_a, C_b): weighted linear least squares.
inline double best_i_inf(const std::vector<CurrentPoint>& pts, double c_a, double c_b, double r) {
  double num = 0.0, den = 0.0;
  for (const auto& p : pts) {
    const double g = ge_current_model(p.z, c_a, c_b, 1.0, r);
    num += p.weight * g * p.i_dc;
    den += p.weight * g * g;
  }
  return num / den;
}

inline double weighted_cost(const std::vector<CurrentPoint>& pts, double c_a, double c_b,
                            double i_inf, double r) {
  double s = 0.0;
  for (const auto& p : pts) {
    const double e = p.i_dc - ge_current_model(p.z, c_a, c_b, i_inf, r);
    s += p.weight * e * e;
  }
  return s;
}

inline FitResult gauss_newton_from(const std::vector<CurrentPoint>& pts, double r, double c_a,
                                   double c_b, double i_inf, const FitOptions& opt) {
  const int np = opt.fix_i_inf ? 2 : 3;
  double cost = weighted_cost(pts, c_a, c_b, i_inf, r);
  double mu = 1e-3;
  FitResult res;
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(np, np);
    Eigen::VectorXd jtr = Eigen::VectorXd::Zero(np);
    for (const auto& p : pts) {
      const double e = std::exp(-c_b * p.z / r);
      const double d = 1.0 + c_a * e;
      const double g = i_inf / d;
      Eigen::VectorXd jac(np);
      jac(0) = -i_inf * e / (d * d);
      jac(1) = i_inf * c_a * e * (p.z / r) / (d * d);
      if (np == 3) jac(2) = 1.0 / d;
      jtj.noalias() += p.weight * jac * jac.transpose();
      jtr.noalias() += p.weight * jac * (p.i_dc - g);
    }
    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (int k = 0; k < np; ++k) a(k, k) += mu * std::max(jtj(k, k), 1e-300);
      const Eigen::VectorXd delta = a.ldlt().solve(jtr);
      const double na = c_a + delta(0);
      const double nb = c_b + delta(1);
      const double ni = np == 3 ? i_inf + delta(2) : i_inf;
      if (na > 0.0 && nb > 0.0 && ni > 0.0 && delta.allFinite()) {
        const double nc = weighted_cost(pts, na, nb, ni, r);
        if (nc <= cost) {
          const double rel = std::abs(delta(0)) / na + std::abs(delta(1)) / nb +
                             (np == 3 ? std::abs(delta(2)) / ni : 0.0);
          const bool tiny_gain = cost - nc <= 1e-15 * std::max(cost, 1e-300);
          c_a = na;
          c_b = nb;
          i_inf = ni;
          cost = nc;
          mu = std::max(mu / 3.0, 1e-12);
          stepped = true;
          if (rel < 1e-12 || (tiny_gain && rel < 1e-8)) res.converged = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!stepped) {
      // No descent direction left at machine precision: a stationary point.
      res.converged = jtr.norm() <= 1e-6 * std::max(1.0, std::sqrt(cost)) * jtj.norm() ||
                      cost <= 1e-24;
      break;
    }
    if (res.converged) break;
  }
  res.c_a = c_a;
  res.c_b = c_b;
  res.i_m_inf = i_inf;
  return res;
}

}  // namespace detail

/// Least-squares fit of (C_a, C_b, I_inf) to DC current versus altitude.
inline FitResult fit_ge_current_model(const std::vector<CurrentPoint>& raw, double rotor_radius,
                                      const FitOptions& opt = {}) {
  if (!(rotor_radius > 0.0)) throw std::invalid_argument("rotor radius must be positive");
  const auto pts = collapse_duplicates(raw);
  if (pts.size() < 4) {
    throw std::invalid_argument("fit needs at least 4 distinct altitudes, got " +
                                std::to_string(pts.size()));
  }
  const double z_lo = pts.front().z, z_hi = pts.back().z;
  if (z_lo < 0.0) throw std::invalid_argument("altitudes must be non-negative");
  if (z_lo > 0.0 && z_hi < 3.0 * z_lo) {
    throw std::invalid_argument("altitudes must span at least a factor of 3");
  }

  FitResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  const int starts = std::max(1, opt.starts);
  for (int s = 0; s < starts; ++s) {
    const double t = starts == 1 ? 0.5 : static_cast<double>(s) / (starts - 1);
    const double a0 = opt.c_a_box[0] * std::pow(opt.c_a_box[1] / opt.c_a_box[0], t);
    const double b0 = opt.c_b_box[0] * std::pow(opt.c_b_box[1] / opt.c_b_box[0], t);
    const double i0 = opt.fix_i_inf ? opt.i_inf_value : detail::best_i_inf(pts, a0, b0, rotor_radius);
    auto r = detail::gauss_newton_from(pts, rotor_radius, a0, b0, i0, opt);
    const double c = detail::weighted_cost(pts, r.c_a, r.c_b, r.i_m_inf, rotor_radius);
    // Converged starts win over unconverged ones regardless of cost.
    if ((r.converged && !any_converged) || (r.converged == any_converged && c < best_cost)) {
      best = r;
      best_cost = c;
      any_converged = any_converged || r.converged;
    }
  }

  best.residuals.clear();
  double sq = 0.0;
  for (const auto& p : raw) {
    const double e = p.i_dc - detail::ge_current_model(p.z, best.c_a, best.c_b, best.i_m_inf,
                                                       rotor_radius);
    best.residuals.push_back(e);
    sq += e * e;
  }
  best.residual_rms = std::sqrt(sq / static_cast<double>(raw.size()));
  if (!any_converged) {
    throw FitError("Gauss-Newton did not converge from any of " + std::to_string(starts) +
                       " starts (best rms " + std::to_string(best.residual_rms) + " A)",
                   best);
  }
  return best;
}

/// DC extraction on every trace followed by the model fit.
inline FitResult identify_from_traces(const std::vector<CurrentTrace>& traces,
                                      double rotor_radius, const FitOptions& opt = {}) {
  std::vector<CurrentPoint> pts;
  pts.reserve(traces.size());
  for (const auto& tr : traces) pts.push_back({tr.altitude, extract_dc(tr).value, 1.0});
  return fit_ge_current_model(pts, rotor_radius, opt);
}

}  // namespace gebench
