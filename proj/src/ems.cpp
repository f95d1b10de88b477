#include "bess/ems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bess/csv.hpp"
#include "bess/errors.hpp"

namespace bess {

Ems Ems::direct(std::vector<double> demand_kw) { return Ems(std::move(demand_kw)); }

Ems Ems::price_arbitrage(const std::vector<double>& prices, double power_kw) {
  std::vector<double> d(prices.size(), 0.0);
  if (prices.empty()) return Ems(std::move(d));
  const double lo = percentile(prices, 25.0);
  const double hi = percentile(prices, 75.0);
  if (lo < hi) {
    for (std::size_t i = 0; i < prices.size(); ++i) {
      if (prices[i] <= lo) d[i] = power_kw;
      else if (prices[i] >= hi) d[i] = -power_kw;
    }
  }
  return Ems(std::move(d));
}

EmsHorizon Ems::horizon(int t0, int steps) const {
  EmsHorizon h;
  const int end = std::min(t0 + steps, length());
  for (int t = std::max(t0, 0); t < end; ++t) h.demand_kw.push_back(demand_[static_cast<std::size_t>(t)]);
  h.truncated = static_cast<int>(h.demand_kw.size()) < steps;
  return h;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (pos - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

std::vector<double> two_level_prices(int steps, int period_steps, double low, double high) {
  if (period_steps < 1) throw DomainError("price period must be >= 1 step");
  std::vector<double> p(static_cast<std::size_t>(std::max(steps, 0)));
  for (int t = 0; t < steps; ++t) p[static_cast<std::size_t>(t)] = (t / period_steps) % 2 == 0 ? low : high;
  return p;
}

std::vector<double> load_profile_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError(fmt::format("cannot open profile '{}'", path.string()), path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();

  std::size_t columns = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    columns = io::split_fields(line).size();
    break;
  }
  if (columns < 1 || columns > 2) throw InputError("profile must have one or two columns", path.string());
  std::vector<double> out;
  for (const auto& row : io::parse_numeric_csv(text, columns, path.string())) out.push_back(row.values.back());
  return out;
}

}  // namespace bess
