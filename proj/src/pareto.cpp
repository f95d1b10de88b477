#include "bess/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

std::vector<SweepPoint> SweepSpec::default_points() {
  return {{"S1", 1.0, 0.0}, {"S2", 0.5, 0.5}, {"S3", 0.0, 1.0}};
}

void SweepSpec::validate() const {
  if (points.empty()) throw DomainError("sweep needs at least one point");
  std::set<std::string> seen;
  for (const auto& p : points) {
    if (p.label.empty()) throw DomainError("sweep point without label");
    if (!seen.insert(p.label).second) throw DomainError(fmt::format("duplicate sweep label '{}'", p.label));
    for (double w : {p.w_inverter, p.w_battery})
      if (!(w >= 0.0 && w <= 1.0)) throw DomainError(fmt::format("sweep point {}: weight outside [0, 1]", p.label));
  }
}

std::vector<SweepResult> pareto_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepResult> results(spec.points.size());
  for (std::size_t i = 0; i < results.size(); ++i) results[i].point = spec.points[i];

  auto run_one = [&](std::size_t i) {
    SweepResult& r = results[i];
    try {
      ScenarioConfig cfg = spec.base;
      cfg.weights.weight[static_cast<std::size_t>(Objective::Availability)] = 1.0;
      cfg.weights.weight[static_cast<std::size_t>(Objective::Derating)] = 1.0;
      cfg.weights.weight[static_cast<std::size_t>(Objective::Inverter)] = r.point.w_inverter;
      cfg.weights.weight[static_cast<std::size_t>(Objective::Battery)] = r.point.w_battery;
      r.trace = spec.runner ? spec.runner(cfg) : run_cosim(cfg);
      r.kpi = compute_kpis(r.trace);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };

  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(
      results.size(), spec.threads > 0 ? static_cast<std::size_t>(spec.threads) : hw);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < results.size(); i = next++) run_one(i);
    });
  for (auto& t : pool) t.join();

  std::stable_sort(results.begin(), results.end(),
                   [](const SweepResult& a, const SweepResult& b) { return a.point.label < b.point.label; });
  return results;
}

std::vector<SweepPoint> parse_sweep(const std::string& text) {
  std::vector<SweepPoint> out;
  std::vector<std::string> items;
  boost::split(items, text, boost::is_any_of(",;"));
  for (auto item : items) {
    boost::trim(item);
    if (item.empty()) continue;
    std::vector<std::string> f;
    boost::split(f, item, boost::is_any_of(":"));
    if (f.size() != 3) throw InputError(fmt::format("sweep entry '{}' must be label:w_inverter:w_battery", item));
    for (auto& x : f) boost::trim(x);
    SweepPoint p;
    p.label = f[0];
    try {
      std::size_t used = 0;
      p.w_inverter = std::stod(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument(f[1]);
      p.w_battery = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument(f[2]);
    } catch (const std::logic_error&) {
      throw InputError(fmt::format("sweep entry '{}': weights must be numbers", item));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace bess
