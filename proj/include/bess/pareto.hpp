#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bess/cosim.hpp"
#include "bess/kpi.hpp"

namespace bess {

/// One weight setting: W3 (inverter) and W4 (battery); W1 = W2 = 1.
struct SweepPoint {
  std::string label;
  double w_inverter = 0.5;
  double w_battery = 0.5;
};

struct SweepSpec {
  std::vector<SweepPoint> points;
  ScenarioConfig base;
  int threads = 0;  // 0: one per point, capped by the hardware
  std::function<TraceLog(const ScenarioConfig&)> runner;  // empty: run_cosim

  /// S1 = (1, 0), S2 = (0.5, 0.5), S3 = (0, 1).
  static std::vector<SweepPoint> default_points();
  /// Throws DomainError for an empty list, duplicate labels or weights
  /// outside [0, 1].
  void validate() const;
};

struct SweepResult {
  SweepPoint point;
  bool ok = false;
  std::string error;
  KpiReport kpi;
  TraceLog trace;
};

/// Runs every point from the same initial conditions, concurrently. A failing
/// point is reported in its result and does not stop the others. Results are
/// ordered by label.
std::vector<SweepResult> pareto_sweep(const SweepSpec& spec);

/// Parses "S1:1:0,S2:0.5:0.5"; throws InputError on malformed entries.
std::vector<SweepPoint> parse_sweep(const std::string& text);

}  // namespace bess
