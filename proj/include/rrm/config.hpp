#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrm/model.hpp"
#include "rrm/sim.hpp"

namespace rrm::config {

enum class SweepMode { allocation, joint };

/// Everything a CLI run needs, after file values and command-line overrides are merged.
struct RunConfig {
  sim::ScenarioConfig scenario;  ///< scenario.params carries B, N0, L, T, lambda, E^comp
  std::vector<Device> devices;   ///< explicit population; empty means generate trial 0
  std::vector<double> gamma;     ///< bandwidth shares for `schedule`; empty means 1/K
  SweepMode mode = SweepMode::allocation;

  RunConfig();

  [[nodiscard]] const SystemParams& params() const { return scenario.params; }
  /// Explicit devices, or the seeded population of trial 0.
  [[nodiscard]] std::vector<Device> resolve_devices() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<int> trials;
  std::optional<SweepMode> mode;
};

/// Parses JSON text. Unknown keys and malformed values raise ConfigError.
RunConfig parse(const std::string& text);
RunConfig load_file(const std::string& path);
void apply(RunConfig& cfg, const Overrides& overrides);

/// Canonical JSON of the resolved configuration; parse(dump(c)) reproduces c.
std::string dump(const RunConfig& cfg);

std::string to_string(SweepMode mode);
SweepMode parse_mode(const std::string& text);

/// 64-bit FNV-1a, hex encoded.
std::string digest(const std::string& text);

}  // namespace rrm::config
