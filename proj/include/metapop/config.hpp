#pragma once

#include "metapop/model.hpp"
#include "metapop/topology.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace metapop {

struct SweepSpec {
  ParamId param = ParamId::R2;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
};

struct SimulateSpec {
  Vec3 x0 = Vec3::Constant(0.1);
  double t_end = 100.0;
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
};

/// A parsed JSON configuration. Parameters come either as arrays
///   {"r": [..3], "k": [..3], "m": [[..3], [..3], [..3]]}
/// or as named scalars {"r1": .., "k2": .., "m12": ..}; diagonal m entries must be 0.
struct RunConfig {
  ModelParams params;
  TopologyId topology = TopologyId::Full;
  std::optional<SweepSpec> sweep;
  SimulateSpec simulate;
  std::uint64_t seed = 0;
  int samples = 200;
};

/// Throws ConfigError (syntax errors carry line and column, missing fields are
/// named) or ValidationError listing every violated parameter invariant.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON: sorted keys, array form for r/k/m, shortest round-trip numbers.
std::string serialize_config(const RunConfig& config);

}  // namespace metapop
