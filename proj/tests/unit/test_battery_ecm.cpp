#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bess/battery_ecm.hpp"
#include "bess/errors.hpp"

using namespace bess;

namespace {

const CellResistanceModel kModel = CellResistanceModel::defaults();
const StringElectricalParams kParams = StringElectricalParams::defaults();

}  // namespace

TEST(Resistance, StringScalingAtMidSoc) {
  // 2.5 mOhm * 192 / 2
  EXPECT_NEAR(total_resistance(kModel, kParams, 0.5, 25.0), 2.5e-3 * 96.0, 1e-12);
}

TEST(Resistance, LowSocBranch) {
  EXPECT_NEAR(cell_resistance_mohm(kModel, 0.0, 25.0), 40.0 * 2.5 / 2.5, 1e-12);
  EXPECT_NEAR(cell_resistance_mohm(kModel, 0.0, 80.0), 40.0 * 0.75 / 2.5, 1e-12);
}

TEST(Resistance, HardSwitchAndBlendedAgreeOutsideBand) {
  for (double soc : {0.0, 0.05, 0.089, 0.111, 0.3, 1.0})
    EXPECT_NEAR(total_resistance(kModel, kParams, soc, 40.0),
                total_resistance_switched(kModel, kParams, soc, 40.0), 1e-15);
  EXPECT_EQ(select_branch(kModel, 0.1), ResistanceBranch::LowSoc);
  EXPECT_EQ(select_branch(kModel, 0.1001), ResistanceBranch::TemperatureOnly);
}

TEST(Resistance, NonIncreasingInSocAndTemperature) {
  double prev = std::numeric_limits<double>::infinity();
  for (double soc = 0.0; soc <= 1.0; soc += 0.001) {
    const double r = total_resistance(kModel, kParams, soc, 30.0);
    EXPECT_LE(r, prev + 1e-15);
    prev = r;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double temp = -10.0; temp <= 100.0; temp += 0.5) {
    const double r = total_resistance(kModel, kParams, 0.05, temp);
    EXPECT_LE(r, prev + 1e-15);
    prev = r;
  }
}

TEST(Resistance, RejectsSocOutsideUnitInterval) {
  EXPECT_THROW(total_resistance(kModel, kParams, -0.01, 25.0), DomainError);
  EXPECT_THROW(total_resistance(kModel, kParams, 1.01, 25.0), DomainError);
}

TEST(Ocv, DefaultTables) {
  EXPECT_NEAR(ocv(kParams, 0.5, Mode::Discharge), 3.70 * 192, 1e-9);
  EXPECT_NEAR(ocv(kParams, 1.0, Mode::Discharge), 4.20 * 192, 1e-9);
  EXPECT_NEAR(ocv(kParams, 0.5, Mode::Charge), (3.70 + 0.05) * 192, 1e-9);
  EXPECT_THROW(ocv(kParams, 1.5, Mode::Charge), DomainError);
}

TEST(SolveCurrent, HandExamples) {
  const double v = 700.0, r = 0.25, p = 100e3;
  const double i_dch_ref = (v - std::sqrt(v * v - 4 * r * p)) / (2 * r);
  const double i_ch_ref = (-v + std::sqrt(v * v + 4 * r * p)) / (2 * r);
  const double i_dch = solve_current(v, r, p, Mode::Discharge);
  const double i_ch = solve_current(v, r, p, Mode::Charge);
  EXPECT_NEAR(i_dch, i_dch_ref, 1e-9);
  EXPECT_NEAR(i_dch, 151.0, 0.1);
  EXPECT_NEAR(i_ch, i_ch_ref, 1e-9);
  EXPECT_NEAR(i_ch, 136.23, 0.01);
  EXPECT_NEAR(v * i_dch - i_dch * i_dch * r, p, 1e-9 * p);
  EXPECT_NEAR(v * i_ch + i_ch * i_ch * r, p, 1e-9 * p);
  EXPECT_EQ(solve_current(v, r, 0.0, Mode::Discharge), 0.0);
}

TEST(SolveCurrent, InfeasibleDischargeCarriesMaxPower) {
  try {
    solve_current(100.0, 1.0, 3000.0, Mode::Discharge);
    FAIL();
  } catch (const InfeasiblePowerError& e) {
    EXPECT_NEAR(e.max_power_w(), 100.0 * 100.0 / 4.0, 1e-9);
  }
}

TEST(SolveCurrent, RandomRootsReproducePower) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uv(300.0, 900.0), ur(0.01, 2.0), uf(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = uv(rng), r = ur(rng);
    const Mode mode = k % 2 ? Mode::Charge : Mode::Discharge;
    const double p = uf(rng) * (mode == Mode::Discharge ? 0.999 * v * v / (4 * r) : 2e5);
    const double i = solve_current(v, r, p, mode);
    const double back = mode == Mode::Discharge ? v * i - i * i * r : v * i + i * i * r;
    EXPECT_LE(std::abs(back - p), 1e-9 * std::max(p, 1.0)) << v << " " << r << " " << p;
  }
}

TEST(HeatPower, HandExamples) {
  EXPECT_NEAR(heat_power(151.0, 0.25), 151.0 * 151.0 * 0.25, 1e-9);
  EXPECT_NEAR(heat_power(151.0, 0.25), 5700.0, 1.0);
  EXPECT_NEAR(heat_power(136.23, 0.25), 4640.0, 1.0);
  EXPECT_EQ(heat_power(0.0, 0.25), 0.0);
}

TEST(Coulomb, HandExamples) {
  // 100 A for 0.25 h out of 156 Ah
  auto r = coulomb_update(0.5, 0.0, 100.0, 900.0, 156.0);
  EXPECT_NEAR(r.soc, 0.5 - 25.0 / 156.0, 1e-12);
  EXPECT_EQ(r.overflow_ah, 0.0);
  r = coulomb_update(0.42, 0.0, 0.0, 900.0, 156.0);
  EXPECT_EQ(r.soc, 0.42);
  // 0.99 + 25/156 = 1.1503, clamp residue 0.1503 of capacity
  r = coulomb_update(0.99, 100.0, 0.0, 900.0, 156.0);
  EXPECT_EQ(r.soc, 1.0);
  EXPECT_NEAR(r.overflow_ah, (0.99 + 25.0 / 156.0 - 1.0) * 156.0, 1e-9);
  EXPECT_NEAR(r.overflow_ah / 156.0, 0.1503, 1e-4);
}

TEST(Coulomb, BothCurrentsIsModeViolation) {
  EXPECT_THROW(coulomb_update(0.5, 1.0, 1.0, 900.0, 156.0), ModeViolationError);
}

TEST(Coulomb, ChargeDischargeRoundTrip) {
  const auto up = coulomb_update(0.3, 80.0, 0.0, 900.0, 156.0);
  const auto down = coulomb_update(up.soc, 0.0, 80.0, 900.0, 156.0);
  EXPECT_NEAR(down.soc, 0.3, 1e-15);
}
