#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "gebench/ge_models.hpp"

using namespace gebench;
using mp = boost::multiprecision::cpp_dec_float_50;

namespace {

const PropellerGeParams kProp1{3.11, 3.56, 0.34};

TEST(Betz, Values) {
  EXPECT_DOUBLE_EQ(betz_power_ratio(0.17, 0.34), 1.0);
  EXPECT_DOUBLE_EQ(betz_power_ratio(0.0, 0.34), 0.0);
  EXPECT_NEAR(betz_power_ratio(0.085, 0.34), 0.5, 1e-15);
  EXPECT_THROW(betz_power_ratio(0.1, 0.0), ModelDomainError);
  EXPECT_THROW(betz_power_ratio(0.1, -1.0), ModelDomainError);
}

TEST(Cheeseman, Values) {
  EXPECT_NEAR(cheeseman_power_ratio(0.085, 0.34), 0.5, 1e-15);
  EXPECT_NEAR(cheeseman_power_ratio(10.0, 0.34), 1.0, 1e-4);
  EXPECT_NEAR(cheeseman_power_ratio(0.17, 0.34), 0.8, 1e-15);
  EXPECT_THROW(cheeseman_power_ratio(0.0, 0.34), ModelDomainError);
}

TEST(Hayden, Values) {
  EXPECT_DOUBLE_EQ(hayden_power_ratio(1.0, 0.34, {1.0, 0.0}), 1.0);
  EXPECT_NEAR(hayden_power_ratio(0.68, 0.34, {1.0, 1.0}), 0.5, 1e-15);
  EXPECT_NEAR(hayden_power_ratio(0.34, 0.34, {1.0, 1.0}), 0.2, 1e-15);
  EXPECT_THROW(hayden_power_ratio(0.0, 0.34), ModelDomainError);
}

TEST(ClassicalModels, FarFieldLimit) {
  const double r = 0.34, z = 100 * r;
  EXPECT_NEAR(cheeseman_power_ratio(z, r), 1.0, 1e-3);
  EXPECT_NEAR(hayden_power_ratio(z, r), 1.0, 1e-3);
  // Betz is a near-ground law; it grows without bound.
  EXPECT_GT(betz_power_ratio(z, r), 1.0);
}

TEST(HeThrust, Values) {
  EXPECT_DOUBLE_EQ(he_thrust_ratio(0.0, kProp1), 4.11);
  EXPECT_NEAR(he_thrust_ratio(1e3, kProp1), 1.0, 1e-15);
  // 1 + 3.11 e^-3.56 evaluated in 50 digits
  const mp oracle = 1 + mp("3.11") * exp(mp("-3.56"));
  EXPECT_NEAR(he_thrust_ratio(0.34, kProp1), oracle.convert_to<double>(), 1e-14);
  EXPECT_NEAR(he_thrust_ratio(0.34, kProp1), 1.0884, 5e-5);
}

TEST(CurrentRatio, Values) {
  EXPECT_NEAR(current_ratio_ige(0.0, kProp1), 0.24331, 5e-6);
  EXPECT_NEAR(current_ratio_ige(1e3, kProp1), 1.0, 1e-15);
  // exact value 0.881483; the tabulated 0.8814 is truncated to four digits
  EXPECT_NEAR(current_ratio_ige(0.30, kProp1), 0.8814, 1e-4);
  const mp oracle = 1 / (1 + mp("3.11") * exp(mp("-3.56") * mp("0.30") / mp("0.34")));
  EXPECT_NEAR(current_ratio_ige(0.30, kProp1), oracle.convert_to<double>(), 1e-15);
}

TEST(CurrentRatio, ReciprocalOfThrustRatio) {
  for (int i = 0; i <= 1000; ++i) {
    const double z = 3.0 * kProp1.rotor_radius * i / 1000.0;
    EXPECT_NEAR(he_thrust_ratio(z, kProp1) * current_ratio_ige(z, kProp1), 1.0, 1e-15);
  }
}

TEST(CurrentRatio, MonotoneGrid) {
  double prev_i = -1.0, prev_f = 1e9;
  for (int i = 0; i <= 1000; ++i) {
    const double z = 3.0 * kProp1.rotor_radius * i / 1000.0;
    const double ci = current_ratio_ige(z, kProp1);
    const double cf = he_thrust_ratio(z, kProp1);
    EXPECT_GT(ci, prev_i);
    EXPECT_LT(cf, prev_f);
    prev_i = ci;
    prev_f = cf;
  }
}

TEST(AltitudeFromCurrent, RoundTripGrid) {
  const double i_inf = 12.39;
  for (int n = 1; n <= 20; ++n) {
    const double z = 0.05 * n;
    const auto r = altitude_from_current(current_ratio_ige(z, kProp1) * i_inf, i_inf, kProp1);
    EXPECT_EQ(r.status, AltitudeStatus::kValid);
    EXPECT_NEAR(r.altitude, z, 1e-10);
  }
}

TEST(AltitudeFromCurrent, RoundTripRandomParams) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ca(0.5, 5.0), cb(1.0, 6.0), unit(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const PropellerGeParams p{ca(rng), cb(rng), 0.34};
    const double z = 3.0 * p.rotor_radius * (1.0 - unit(rng));  // (0, 3R]
    const double i_inf = 5.0 + 20.0 * unit(rng);
    const auto r = altitude_from_current(current_ratio_ige(z, p) * i_inf, i_inf, p);
    ASSERT_NE(r.status, AltitudeStatus::kBeyondGe) << "z=" << z;
    EXPECT_NEAR(r.altitude, z, 1e-10) << "C_a=" << p.c_a << " C_b=" << p.c_b;
  }
}

TEST(AltitudeFromCurrent, InverseOfTabulatedRatio) {
  // 0.8814 is the four-digit forward value at 0.30 m; the slope there is
  // about 0.3 per metre, so four digits pin z to ~0.2 mm.
  const auto r = altitude_from_current(0.8814, 1.0, kProp1);
  EXPECT_NEAR(r.altitude, 0.30, 5e-4);
}

TEST(AltitudeFromCurrent, GroundAndBeyond) {
  const double i_inf = 12.39;
  const auto g = altitude_from_current(i_inf / (1.0 + kProp1.c_a), i_inf, kProp1);
  EXPECT_EQ(g.altitude, 0.0);
  EXPECT_EQ(g.status, AltitudeStatus::kBelowGround);
  const auto below = altitude_from_current(1.0, i_inf, kProp1);
  EXPECT_EQ(below.altitude, 0.0);
  EXPECT_EQ(below.status, AltitudeStatus::kBelowGround);
  const auto beyond = altitude_from_current(i_inf * 1.01, i_inf, kProp1);
  EXPECT_EQ(beyond.status, AltitudeStatus::kBeyondGe);
  EXPECT_DOUBLE_EQ(beyond.altitude, 3.0 * kProp1.rotor_radius);
  EXPECT_DOUBLE_EQ(altitude_from_current(i_inf, i_inf, kProp1, 0.7).altitude, 0.7);
  EXPECT_THROW(altitude_from_current(1.0, 0.0, kProp1), ModelDomainError);
}

TEST(RatioModels, FiniteNonNegativeFuzz) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> zr(1e-6, 50.0), rr(1e-3, 5.0), ca(0.01, 10.0),
      cb(0.01, 10.0), a(0.1, 5.0), b(0.0, 5.0);
  for (int n = 0; n < 20000; ++n) {
    const double z = zr(rng), r = rr(rng);
    const PropellerGeParams p{ca(rng), cb(rng), r};
    for (double v : {betz_power_ratio(z, r), cheeseman_power_ratio(z, r),
                     hayden_power_ratio(z, r, {a(rng), b(rng)}), he_thrust_ratio(z, p),
                     current_ratio_ige(z, p)}) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
    }
  }
}

// Term-by-term 50-digit evaluation of the geometry formula.
mp geometry_oracle(mp cl, mp s, mp th) {
  const mp root = sqrt(192 * cl * s * th + 9 * cl * s * s);
  return (root - 3 * cl * s) / (32 * th + 3 * cl * s - root);
}

TEST(GeometryCa, MatchesHighPrecision) {
  for (auto [cl, s, th] : {std::tuple{5.7, 0.1, 0.2}, std::tuple{6.28, 0.08, 0.15},
                           std::tuple{5.0, 0.12, 0.3}}) {
    const double got = max_thrust_ratio_from_geometry({cl, s, th});
    const double want = geometry_oracle(mp(cl), mp(s), mp(th)).convert_to<double>();
    EXPECT_NEAR(got, want, 1e-12 * std::abs(want));
    EXPECT_GT(got, 0.0);
  }
}

TEST(GeometryCa, DependsOnLiftSlopeOnlyThroughItsProducts) {
  // Written in u = C_la sigma and sigma alone, the formula must agree.
  auto via_products = [](double u, double s, double th) {
    const double root = std::sqrt(192.0 * u * th + 9.0 * u * s);
    return (root - 3.0 * u) / (32.0 * th + 3.0 * u - root);
  };
  for (double cl : {4.0, 5.7, 6.5}) {
    for (double s : {0.05, 0.1, 0.15}) {
      const double got = max_thrust_ratio_from_geometry({cl, s, 0.2});
      EXPECT_NEAR(got, via_products(cl * s, s, 0.2), 1e-13 * got);
    }
  }
}

TEST(GeometryCa, PositiveAndVanishesAtLargePitch) {
  double last = 0.0;
  for (double th = 0.05; th < 1e4; th *= 1.5) {
    last = max_thrust_ratio_from_geometry({5.7, 0.1, th});
    EXPECT_GT(last, 0.0);
  }
  EXPECT_LT(last, 1e-2);
}

TEST(GeometryCa, DomainErrors) {
  EXPECT_THROW(max_thrust_ratio_from_geometry({5.7, 0.1, -1.0}), ModelDomainError);
  try {
    max_thrust_ratio_from_geometry({5.7, 0.1, -1.0});
  } catch (const ModelDomainError& e) {
    EXPECT_NE(std::string(e.what()).find("discriminant"), std::string::npos);
  }
}

TEST(PropellerGeParams, Validation) {
  EXPECT_NO_THROW(kProp1.validate());
  EXPECT_THROW((PropellerGeParams{0.0, 1.0, 0.3}.validate()), ModelDomainError);
  EXPECT_THROW((PropellerGeParams{1.0, -1.0, 0.3}.validate()), ModelDomainError);
  EXPECT_THROW((PropellerGeParams{1.0, 1.0, 0.0}.validate()), ModelDomainError);
}

}  // namespace
