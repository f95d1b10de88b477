#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bess/cosim.hpp"
#include "bess/pareto.hpp"

namespace bess {

/// Scenario file contents after applying every override to the reference
/// scenario.
///
/// The file is INI. Sections: [scenario] [initial] [electrical] [resistance]
/// [inverter] [thermal] [derating] [weights] [priorities] [model] [solver]
/// [demand] [sweep], plus [string.N] (0-based) holding per-string overrides of
/// initial, electrical, inverter, thermal and derating keys. Tables are given
/// inline as "x:y x:y ..." or as the path of a two-column CSV. Relative paths
/// are resolved against the file's directory. An empty file is the reference
/// scenario.
struct LoadedScenario {
  ScenarioConfig config = ScenarioConfig::reference();
  std::vector<SweepPoint> sweep = SweepSpec::default_points();
  bool has_thermal_section = false;
};

/// Throws InputError (with the path) when the file is missing or a key or
/// value is invalid.
LoadedScenario load_scenario(const std::filesystem::path& path);
LoadedScenario parse_scenario(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir = {});

/// Canonical INI text of the effective scenario; demand values are summarised
/// by count and checksum. Used for the config checksum in output headers.
std::string scenario_to_ini(const ScenarioConfig& cfg, const std::vector<SweepPoint>& sweep);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace bess
