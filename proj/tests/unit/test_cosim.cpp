#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bess/cosim.hpp"
#include "bess/errors.hpp"
#include "bess/kpi.hpp"

using namespace bess;

namespace {

ScenarioConfig direct(std::vector<double> demand, int horizon, int strings = 2) {
  ScenarioConfig c = ScenarioConfig::reference();
  c.strings.resize(static_cast<std::size_t>(strings));
  c.initial.resize(static_cast<std::size_t>(strings), StringInit{0.5, 25.0, 1.0});
  c.demand.kind = DemandSpec::Kind::Direct;
  c.sim_duration = static_cast<int>(demand.size());
  c.demand.values = std::move(demand);
  c.horizon_steps = horizon;
  c.apply_steps = horizon;
  return c;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Ems, DirectPassthrough) {
  const Ems e = Ems::direct({50.0, -80.0, 0.0});
  const auto h = e.horizon(0, 3);
  EXPECT_EQ(h.demand_kw, (std::vector<double>{50.0, -80.0, 0.0}));
  EXPECT_FALSE(h.truncated);
}

TEST(Ems, FlatPricesIdle) {
  const Ems e = Ems::price_arbitrage(std::vector<double>(10, 42.0), 100.0);
  for (double d : e.demand()) EXPECT_EQ(d, 0.0);
}

TEST(Ems, TwoLevelPricesChargeLowDischargeHigh) {
  // 4 low (20) then 4 high (80): p25 = 20 and p75 = 80 by interpolation, so
  // every step sits on one of the two thresholds
  const auto prices = two_level_prices(8, 4);
  EXPECT_EQ(prices, (std::vector<double>{20, 20, 20, 20, 80, 80, 80, 80}));
  EXPECT_DOUBLE_EQ(percentile(prices, 25.0), 20.0);
  EXPECT_DOUBLE_EQ(percentile(prices, 75.0), 80.0);
  const Ems e = Ems::price_arbitrage(prices, 60.0);
  EXPECT_EQ(e.demand(), (std::vector<double>{60, 60, 60, 60, -60, -60, -60, -60}));
}

TEST(Ems, MiddlePricesIdle) {
  // sorted {10, 20, 30, 40, 50}: p25 = 20, p75 = 40
  const Ems e = Ems::price_arbitrage({30, 10, 50, 20, 40}, 10.0);
  EXPECT_EQ(e.demand(), (std::vector<double>{0, 10, -10, 10, -10}));
}

TEST(Ems, HorizonTruncatedAtProfileEnd) {
  const Ems e = Ems::direct({1, 2, 3, 4, 5});
  const auto h = e.horizon(3, 4);
  EXPECT_EQ(h.demand_kw, (std::vector<double>{4, 5}));
  EXPECT_TRUE(h.truncated);
  EXPECT_TRUE(e.horizon(5, 2).demand_kw.empty());
}

TEST(Ems, ProfileCsvWithHeaderAndStepColumn) {
  const auto p = write_temp("bess_profile_ok.csv", "step,kw\n0,50\n1,-80\n2,0\n");
  EXPECT_EQ(load_profile_csv(p), (std::vector<double>{50, -80, 0}));
  const auto single = write_temp("bess_profile_single.csv", "12.5\n-3\n");
  EXPECT_EQ(load_profile_csv(single), (std::vector<double>{12.5, -3}));
}

TEST(Ems, MalformedProfileNamesLine) {
  const auto p = write_temp("bess_profile_bad.csv", "step,kw\n0,50\n1,oops\n");
  try {
    load_profile_csv(p);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Cosim, ZeroDemandKeepsInitialState) {
  const auto log = run_cosim(direct(std::vector<double>(8, 0.0), 2));
  EXPECT_EQ(log.horizons.size(), 4u);
  ASSERT_EQ(log.n_steps(), 8);
  for (const auto& r : log.rows) {
    EXPECT_DOUBLE_EQ(r.soc, 0.5);
    EXPECT_DOUBLE_EQ(r.temp_mean, 25.0);
    EXPECT_EQ(r.setpoint_kw, 0.0);
  }
  EXPECT_TRUE(log.warnings.empty());
}

TEST(Cosim, SingleStringDischargeDepletes) {
  // 0.5 * 156 Ah at roughly 151 A lasts about 0.52 h, i.e. two 15 min steps
  const auto log = run_cosim(direct(std::vector<double>(6, -100.0), 3, 1));
  ASSERT_EQ(log.n_steps(), 6);
  double prev = 0.5;
  int first_loss = -1;
  for (int t = 0; t < 6; ++t) {
    const auto& r = log.at(t, 0);
    EXPECT_LE(r.soc, prev + 1e-12);
    prev = r.soc;
    if (first_loss < 0 && r.p_avail_kw > 1.0) first_loss = t;
  }
  EXPECT_LT(log.at(1, 0).soc, 0.05);
  ASSERT_GE(first_loss, 1);
  EXPECT_LE(first_loss, 3);
  bool low_flag = false;
  for (int t = 2; t < 6; ++t) low_flag = low_flag || log.at(t, 0).b_low == 1;
  EXPECT_TRUE(low_flag);
  EXPECT_LT(compute_kpis(log).availability, 100.0);
}

TEST(Cosim, FeedbackIsBitEqual) {
  ScenarioConfig c = ScenarioConfig::reference();
  c.sim_duration = 16;
  c.horizon_steps = 4;
  c.apply_steps = 4;
  const auto log = run_cosim(c);
  ASSERT_EQ(log.horizons.size(), 4u);
  for (std::size_t h = 1; h < log.horizons.size(); ++h) {
    const auto& rec = log.horizons[h];
    for (int m = 0; m < 2; ++m) {
      const auto& last = log.at(rec.t0 - 1, m);
      EXPECT_EQ(rec.init_soc[static_cast<std::size_t>(m)], last.soc);
      EXPECT_EQ(rec.init_temp[static_cast<std::size_t>(m)], last.temp_mean);
    }
  }
}

TEST(Cosim, EnergyClosesAndDemandIsSplit) {
  ScenarioConfig c = ScenarioConfig::reference();
  c.sim_duration = 24;
  c.demand.price_period_steps = 4;
  const auto log = run_cosim(c);
  const auto e = energy_account(log);
  EXPECT_GT(e.throughput_kwh, 100.0);
  EXPECT_LE(e.relative_residual(), 0.01);

  const double pn = c.strings[0].electrical.p_nominal_kw;
  for (int t = 0; t < log.n_steps(); ++t) {
    double sum = 0.0, avail = 0.0;
    for (int m = 0; m < 2; ++m) {
      sum += log.at(t, m).setpoint_kw;
      avail += log.at(t, m).p_avail_kw + log.at(t, m).planned_avail_kw;
      EXPECT_GE(log.at(t, m).p_heat_kw, 0.0);
      EXPECT_GE(log.at(t, m).p_inv_kw, 0.0);
    }
    if (avail == 0.0) EXPECT_NEAR(sum, std::abs(log.at(t, 0).demand_kw), 1e-6 * pn) << "step " << t;
  }
}

TEST(Cosim, ShortProfileTruncatesWithWarning) {
  ScenarioConfig c = direct({20, 20, 20, 20, 20}, 4);
  c.sim_duration = 8;
  const auto log = run_cosim(c);
  EXPECT_EQ(log.n_steps(), 5);
  ASSERT_EQ(log.horizons.size(), 2u);
  EXPECT_TRUE(log.horizons[1].truncated);
  EXPECT_EQ(log.horizons[1].steps, 1);
  EXPECT_FALSE(log.warnings.empty());
}

TEST(Cosim, OneStepRecedingHorizon) {
  ScenarioConfig c = ScenarioConfig::reference();
  c.sim_duration = 4;
  c.horizon_steps = 3;
  c.apply_steps = 1;
  const auto log = run_cosim(c);
  EXPECT_EQ(log.horizons.size(), 4u);
  for (const auto& h : log.horizons) EXPECT_EQ(h.applied_steps, 1);
}

TEST(Cosim, ConfigValidation) {
  ScenarioConfig c = ScenarioConfig::reference();
  c.apply_steps = 9;
  EXPECT_THROW(run_cosim(c), ModelError);
  c = ScenarioConfig::reference();
  c.initial[0].soc = 1.5;
  EXPECT_THROW(run_cosim(c), DomainError);
  c = ScenarioConfig::reference();
  c.demand.arbitrage_fraction = 2.0;
  EXPECT_THROW(run_cosim(c), DomainError);
}
