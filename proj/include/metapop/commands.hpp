#pragma once

#include "metapop/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace metapop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitUsage = 2;

/// Command-line overrides applied on top of the config file.
struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> topology;
  std::optional<std::string> param;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<int> steps;
  std::uint64_t seed = 0;
  std::optional<int> samples;
  std::optional<double> t_end;
};

/// Config file merged with the overrides. Throws ConfigError / ValidationError.
RunConfig resolve_config(const CommandOptions& opts);

void cmd_enumerate(std::ostream& out);
void cmd_analyze(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);
void cmd_basin(const RunConfig& cfg, std::ostream& out);
/// Returns kExitOk or kExitPropertyFailure.
int cmd_verify(std::uint64_t seed, int n, std::ostream& out);

}  // namespace metapop
