#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bess/thermal_plant.hpp"

using namespace bess;

namespace {

StringState ambient(const ThermalParams& p, double soc = 0.5) { return StringState::uniform(p, soc, p.t_air); }

}  // namespace

TEST(Fdm, EquilibriumIsFixedPoint) {
  ThermalParams p;
  const auto s = ambient(p);
  const auto next = fdm_step(s, p, 0.0, 900.0);
  for (double t : next.temps) EXPECT_EQ(t, p.t_air);
  EXPECT_EQ(next.temp_mean, p.t_air);
}

TEST(Fdm, SteadyStateApproachesLumpedValue) {
  ThermalParams p;
  p.h_conv = 200.0;
  auto s = ambient(p);
  for (int k = 0; k < 2000; ++k) s = fdm_step(s, p, 5100.0, 900.0);
  // lumped steady state: t_air + q / h = 25 + 5100 / 200
  const double lumped = p.t_air + 5100.0 / 200.0;
  EXPECT_NEAR(lumped, 50.5, 1e-12);
  // boundary nodes sit exactly at the lumped value; the rod's mean is a
  // conduction gradient above it
  EXPECT_NEAR(s.temps.front(), lumped, 1e-6);
  EXPECT_GT(s.temp_mean, lumped);
  EXPECT_LT(s.temp_mean - lumped, 0.2);
}

TEST(Fdm, SteadyFieldSymmetricAndCoolestAtEnds) {
  ThermalParams p;
  auto s = ambient(p);
  for (int k = 0; k < 2000; ++k) s = fdm_step(s, p, 4000.0, 900.0);
  const auto n = s.temps.size();
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(s.temps[i], s.temps[n - 1 - i], 1e-9);
    EXPECT_GE(s.temps[i], s.temps.front() - 1e-12);
  }
  EXPECT_GT(s.temps[n / 2], s.temps.front());
}

TEST(Fdm, EnergyBalanceClosesEveryStep) {
  ThermalParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> q(0.0, 8000.0);
  auto s = ambient(p);
  double stored = 0.0, net = 0.0;
  const double start_mean = s.temp_mean;
  for (int k = 0; k < 96; ++k) {
    FdmBalance bal;
    s = fdm_step(s, p, q(rng), 900.0, &bal);
    EXPECT_LE(bal.relative_residual(), 1e-6);
    EXPECT_GE(bal.sub_steps, 1);
    stored += bal.stored_j;
    net += bal.injected_j - bal.convected_j;
  }
  EXPECT_NEAR(p.c_total * (s.temp_mean - start_mean), net, 1e-6 * std::abs(net));
  EXPECT_NEAR(stored, net, 1e-6 * std::abs(net));
}

TEST(Fdm, MeanTracksLumpedModelOverOneDay) {
  ThermalParams p;
  auto s = ambient(p);
  double exact = p.t_air;  // lumped ODE, exact over each step
  double euler = p.t_air;  // the optimizer's one-step recursion
  const double dt = 900.0;
  double worst_exact = 0.0, worst_euler = 0.0;
  for (int k = 0; k < 96; ++k) {
    const double q = (k / 8) % 2 == 0 ? 5200.0 : 600.0;
    const double steady = p.t_air + q / p.h_conv;
    exact = steady + (exact - steady) * std::exp(-p.k2() * dt);
    euler = euler + dt * (p.k1() * q - p.k2() * (euler - p.t_air));
    s = fdm_step(s, p, q, dt);
    worst_exact = std::max(worst_exact, std::abs(s.temp_mean - exact));
    worst_euler = std::max(worst_euler, std::abs(s.temp_mean - euler));
  }
  EXPECT_LT(worst_exact, 0.1);
  // regression bound: time discretisation of the one-step recursion
  EXPECT_LT(worst_euler, 0.2);
}

TEST(Pi, HandComputedAnchors) {
  PiDerateController c;
  StringState s;
  s.temp_mean = 40.0;
  EXPECT_EQ(pi_derate_update(c, s).k_derate, 1.0);
  s.temp_mean = 65.0;
  EXPECT_EQ(pi_derate_update(c, s).k_derate, 0.0);
  s.temp_mean = 55.0;
  s.pi_integral = 0.0;
  EXPECT_NEAR(pi_derate_update(c, s).k_derate, 1.0 - 0.035 * 10.0, 1e-12);
}

TEST(Pi, IntegralAntiWindupAndDecay) {
  PiDerateController c;
  StringState s;
  s.temp_mean = 59.0;
  for (int k = 0; k < 200; ++k) {
    const auto u = pi_derate_update(c, s);
    const double e = s.temp_mean - c.t_start;
    EXPECT_LE(c.kp * e + c.ki * u.pi_integral, 1.0 + 1e-12);
    EXPECT_GE(u.k_derate, 0.0);
    s.pi_integral = u.pi_integral;
  }
  // back below t_start the integral drains and k recovers to 1
  s.temp_mean = 30.0;
  for (int k = 0; k < 200; ++k) s.pi_integral = pi_derate_update(c, s).pi_integral;
  EXPECT_EQ(s.pi_integral, 0.0);
  EXPECT_EQ(pi_derate_update(c, s).k_derate, 1.0);
}

TEST(Pi, NonIncreasingAlongHeatingTrajectory) {
  PiDerateController c;
  StringState s;
  double prev = 1.0;
  for (double t = 44.0; t <= 62.0; t += 0.3) {
    s.temp_mean = t;
    const auto u = pi_derate_update(c, s);
    EXPECT_LE(u.k_derate, prev + 1e-15);
    prev = u.k_derate;
    s.pi_integral = u.pi_integral;
  }
}

TEST(Plant, ApplyExamples) {
  StringPlant plant;
  auto s = ambient(plant.thermal);
  auto r = plant_apply(plant, s, 50.0, Mode::Discharge, 900.0);
  EXPECT_DOUBLE_EQ(r.applied_kw, 50.0);
  EXPECT_DOUBLE_EQ(r.derate_loss_kw, 0.0);

  s.k_derate_applied = 0.65;
  r = plant_apply(plant, s, 100.0, Mode::Discharge, 900.0);
  EXPECT_NEAR(r.applied_kw, 65.0, 1e-12);
  EXPECT_NEAR(r.derate_loss_kw, 35.0, 1e-12);

  s.k_derate_applied = 0.0;
  r = plant_apply(plant, s, 80.0, Mode::Charge, 900.0);
  EXPECT_EQ(r.applied_kw, 0.0);
  EXPECT_EQ(r.derate_loss_kw, 80.0);
  EXPECT_EQ(r.heat_kw, 0.0);
}

TEST(Plant, EnergyClosesPerStep) {
  StringPlant plant;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto s = ambient(plant.thermal, 0.5);
  for (int k = 0; k < 300; ++k) {
    const Mode mode = u(rng) < 0.5 ? Mode::Charge : Mode::Discharge;
    const auto r = plant_apply(plant, s, 100.0 * u(rng), mode, 900.0);
    const double signed_applied = mode == Mode::Charge ? r.applied_kw : -r.applied_kw;
    EXPECT_NEAR(signed_applied, r.stored_kw + r.heat_kw + r.inverter_kw, 1e-9);
    EXPECT_GE(r.avail_loss_kw, 0.0);
    s = r.state;
  }
}

TEST(Plant, OverflowBecomesAvailabilityLoss) {
  StringPlant plant;
  auto s = ambient(plant.thermal, 0.99);
  const auto r = plant_apply(plant, s, 100.0, Mode::Charge, 900.0);
  EXPECT_EQ(r.state.soc, 1.0);
  EXPECT_GT(r.overflow_kwh, 0.0);
  EXPECT_GT(r.avail_loss_kw, 0.0);
  EXPECT_LT(r.applied_kw, 100.0);
}

TEST(Plant, EcmClampAtDeepDischarge) {
  StringPlant plant;
  auto s = ambient(plant.thermal, 0.0);
  const auto r = plant_apply(plant, s, 100.0, Mode::Discharge, 900.0);
  EXPECT_TRUE(r.ecm_clamped);
  EXPECT_GT(r.avail_loss_kw, 0.0);
}

TEST(Calibration, SensitivityNearTwelveMillikelvinPerKw) {
  StringPlant plant;
  const double s = calibrate_sensitivity(plant);
  EXPECT_NEAR(s, 0.012, 0.004);

  StringPlant doubled = plant;
  doubled.thermal.c_total *= 2.0;
  EXPECT_NEAR(calibrate_sensitivity(doubled) / s, 0.5, 0.025);
}
