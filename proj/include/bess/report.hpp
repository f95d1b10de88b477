#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bess/cosim.hpp"
#include "bess/kpi.hpp"
#include "bess/pareto.hpp"

namespace bess {

inline constexpr std::string_view kTraceSchema = "bess.trace.v1";
inline constexpr std::string_view kHorizonSchema = "bess.horizons.v1";
inline constexpr std::string_view kKpiSchema = "bess.kpis.v1";
inline constexpr std::string_view kParetoSchema = "bess.pareto.v1";
inline constexpr std::string_view kRadarSchema = "bess.radar.v1";

struct RunManifest {
  std::string command;
  std::string config_path;            // empty: built-in reference scenario
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // unused by the built-in profiles
  std::string version;
  std::uint64_t config_checksum = 0;
  std::string generated;              // timestamp; the only run-dependent field
};

/// "# bess_split <version> command=... schema=... config=... config_fnv1a=... generated=..."
/// Every emitted file carries this as its single first line (CSV) or as the
/// "header" member (JSON).
std::string header_line(const RunManifest& m, std::string_view schema);

/// UTC, ISO 8601 to the second.
std::string utc_timestamp();

std::string trace_csv(const TraceLog& trace, const RunManifest& m);
std::string horizons_csv(const TraceLog& trace, const RunManifest& m);
std::string kpis_json(const TraceLog& trace, const KpiReport& kpi, const RunManifest& m);

std::string pareto_csv(const std::vector<SweepResult>& results, const RunManifest& m);
std::string pareto_json(const std::vector<SweepResult>& results, const RunManifest& m);
/// Each KPI min-max scaled over the successful points (1 when all equal).
std::string radar_csv(const std::vector<SweepResult>& results, const RunManifest& m);

}  // namespace bess
