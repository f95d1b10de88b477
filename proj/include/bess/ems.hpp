#pragma once

#include <filesystem>
#include <vector>

namespace bess {

struct EmsHorizon {
  std::vector<double> demand_kw;  // signed, + charge
  bool truncated = false;
};

/// Demand provider for the co-simulation.
///
/// Direct mode replays a demand profile. Arbitrage mode turns a static price
/// profile into demand: charge at `power_kw` when the price is at or below
/// the 25th percentile of the whole profile, discharge at or above the 75th,
/// idle otherwise (and everywhere when the two percentiles coincide).
class Ems {
 public:
  static Ems direct(std::vector<double> demand_kw);
  static Ems price_arbitrage(const std::vector<double>& prices, double power_kw);

  /// Window [t0, t0 + steps); shorter and flagged when the profile ends.
  EmsHorizon horizon(int t0, int steps) const;
  int length() const { return static_cast<int>(demand_.size()); }
  const std::vector<double>& demand() const { return demand_; }

 private:
  explicit Ems(std::vector<double> d) : demand_(std::move(d)) {}
  std::vector<double> demand_;
};

/// Linear-interpolation percentile (q in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// Square-wave price profile: `period_steps` low, then `period_steps` high, ...
std::vector<double> two_level_prices(int steps, int period_steps, double low = 20.0, double high = 80.0);

/// Single-column numeric profile; a header row and a leading step/timestamp
/// column are accepted. Throws InputError naming the offending line.
std::vector<double> load_profile_csv(const std::filesystem::path& path);

}  // namespace bess
