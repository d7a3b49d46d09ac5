#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gebench/csv.hpp"
#include "gebench/simulation.hpp"

using namespace gebench;

namespace {

ScenarioConfig hover_config(double duration) {
  ScenarioConfig c = bench_scenario();
  c.timeline.start_in_hover = true;
  c.timeline.pitch_profile = {{0.0, 0.0}};
  c.duration = duration;
  c.evaluation.hover = {0.0, duration};
  c.evaluation.maneuver = {0.0, duration};
  return c;
}

TEST(Timeline, References) {
  TimelineConfig t;
  const Timeline tl(t);
  EXPECT_EQ(tl.altitude(0.0), 0.0);
  EXPECT_DOUBLE_EQ(tl.altitude(1.0), 0.15);
  EXPECT_EQ(tl.altitude(5.0), 0.3);
  EXPECT_EQ(tl.pitch(10.0), 0.0);
  EXPECT_NEAR(tl.pitch(20.5), 0.025, 1e-15);
  EXPECT_EQ(tl.pitch(25.0), 0.05);
  EXPECT_EQ(tl.pitch(35.0), 0.0);
  t.pitch_shape = ProfileShape::kLinear;
  EXPECT_NEAR(Timeline(t).pitch(20.25), 0.0125, 1e-15);
  t.start_in_hover = true;
  EXPECT_EQ(Timeline(t).altitude(0.0), 0.3);
}

TEST(Simulation, HoverIsAFixedPoint) {
  const auto rec = run_scenario(hover_config(5.0));
  for (const auto& r : rec.rows) {
    ASSERT_LT(std::abs(r.z - 0.3), 1e-6) << "t=" << r.t;
  }
  EXPECT_EQ(rec.events.ground_contacts, 0u);
  EXPECT_EQ(rec.events.thrust_clamps, 0u);
}

TEST(Simulation, RecordShape) {
  const auto c = hover_config(0.5);
  const auto rec = run_scenario(c);
  ASSERT_EQ(rec.rows.size(), 501u);
  for (std::size_t n = 0; n < rec.rows.size(); ++n) {
    EXPECT_DOUBLE_EQ(rec.rows[n].t, n * c.dt);
  }
}

TEST(Simulation, NoThrustStaysOnGround) {
  ScenarioConfig c = bench_scenario();
  c.control.enabled = false;
  c.duration = 2.0;
  c.evaluation.hover = {0.0, 2.0};
  c.evaluation.maneuver = {0.0, 2.0};
  const auto rec = run_scenario(c);
  for (const auto& r : rec.rows) {
    ASSERT_EQ(r.z, 0.0);
    ASSERT_EQ(r.z_dot, 0.0);
    ASSERT_EQ(r.omega1, 0.0);
    ASSERT_EQ(r.f1, 0.0);
  }
  EXPECT_EQ(rec.events.ground_contacts, 2000u);
}

TEST(Simulation, ErrorBookkeeping) {
  ScenarioConfig c = bench_scenario();
  c.duration = 3.0;
  c.noise.current_sigma = 0.1;
  const auto rec = run_scenario(c);
  for (const auto& r : rec.rows) {
    ASSERT_EQ(r.e_z, r.z_hat - r.z);
    ASSERT_EQ(r.e_theta, r.theta_hat - r.theta);
    ASSERT_EQ(r.k, coupling_from_altitude(r.z, c.coupling).k);
  }
}

TEST(Simulation, ServoCurrentAtSteadyState) {
  const auto c = hover_config(3.0);
  const auto rec = run_scenario(c);
  const auto& last = rec.rows.back();
  const double i1 = steady_current(last.omega1, c.motors[0], true);
  const double i2 = steady_current(last.omega2, c.motors[1], true);
  EXPECT_NEAR(last.i1, i1, 1e-3 * i1);
  EXPECT_NEAR(last.i2, i2, 1e-3 * i2);
}

class BenchRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { rec_ = new TrajectoryRecord(run_scenario(bench_scenario())); }
  static void TearDownTestSuite() {
    delete rec_;
    rec_ = nullptr;
  }
  static TrajectoryRecord* rec_;
};
TrajectoryRecord* BenchRun::rec_ = nullptr;

TEST_F(BenchRun, ClaimsHold) {
  const auto s = summarize(*rec_, bench_scenario());
  EXPECT_TRUE(s.altitude_claim) << s.altitude_hover.max_abs;
  EXPECT_TRUE(s.pitch_claim) << s.pitch_max_both;
  EXPECT_LT(s.altitude_steady.max_abs, 3e-3);
}

TEST_F(BenchRun, MeanThrustBalancesWeight) {
  const double mg = bench_scenario().body.weight();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rec_->rows) {
    if (r.t < 35.0) continue;
    sum += (r.f1 + r.f2) * std::cos(r.theta);
    ++n;
  }
  EXPECT_NEAR(sum / n, mg, 1e-3 * mg);
}

TEST_F(BenchRun, HalvingStepBarelyMovesFinalState) {
  ScenarioConfig fine = bench_scenario();
  fine.dt = 0.5e-3;
  const auto rec = run_scenario(fine);
  EXPECT_LT(std::abs(rec.rows.back().z - rec_->rows.back().z), 1e-5);
}

TEST(Simulation, DeterministicBytes) {
  ScenarioConfig c = bench_scenario();
  c.duration = 5.0;
  c.noise.current_sigma = 0.05;
  c.noise.seed = 99;
  std::ostringstream a, b;
  emit_csv(run_scenario(c), a);
  emit_csv(run_scenario(c), b);
  EXPECT_EQ(a.str(), b.str());
  c.noise.seed = 100;
  std::ostringstream other;
  emit_csv(run_scenario(c), other);
  EXPECT_NE(a.str(), other.str());
}

TEST(Simulation, DivergenceIsReported) {
  ScenarioConfig c = bench_scenario();
  c.dt = 0.05;
  c.duration = 20.0;
  try {
    run_scenario(c);
    FAIL() << "expected divergence";
  } catch (const SimulationDiverged& e) {
    EXPECT_GT(e.last_valid_step(), 0u);
    EXPECT_LT(e.last_valid_step(), 400u);
    EXPECT_NE(std::string(e.what()).find("diverged"), std::string::npos);
  }
}

TEST(Simulation, InvalidConfigRejected) {
  ScenarioConfig c = bench_scenario();
  c.dt = 0.0;
  EXPECT_THROW(BenchSimulation{c}, ConfigError);
}

TEST(Sweep, FiveRowsParallelEqualsSerial) {
  ScenarioConfig c = bench_scenario();
  c.duration = 25.0;
  c.evaluation.maneuver = {20.0, 25.0};
  const auto serial = run_parameter_error_sweep(c, coefficient_sweep_scalings(), false);
  const auto parallel = run_parameter_error_sweep(c, coefficient_sweep_scalings(), true);
  ASSERT_EQ(serial.cases.size(), 5u);
  std::ostringstream a, b;
  emit_csv(serial, a);
  emit_csv(parallel, b);
  EXPECT_EQ(a.str(), b.str());
  for (const auto& k : serial.cases) {
    EXPECT_GE(k.altitude.rmsd, 0.0);
    EXPECT_GE(k.pitch.rmsd, 0.0);
  }
  // baseline without model error sits inside the steady tolerance
  EXPECT_LT(serial.cases[0].altitude.max_abs, 3e-3);
  EXPECT_EQ(serial.cases[2].scaling.c_a, 1.05);
  EXPECT_EQ(serial.cases[2].scaling.c_b, 0.95);
}

}  // namespace
