#pragma once

#include "metapop/model.hpp"
#include "metapop/topology.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace metapop {

enum class Terminal { Steady, MaxTime, Diverged };
std::string_view to_string(Terminal t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec3> states;
  Terminal terminal = Terminal::MaxTime;
};

/// Adaptive Dormand–Prince 5(4) integration of the model from x0 up to t_end.
/// A component pushed below zero is clamped when its magnitude is <= abs_tol;
/// otherwise the step is retried at half size. Stops early once the rhs max-norm
/// stays below 1e-9 (1 + |x|) for 10 consecutive accepted steps.
/// Throws StepUnderflowError when the step shrinks below 1e-14 t_end.
Trajectory integrate(const ModelParams& params, const ModelState& x0, double t_end, double rel_tol = 1e-11,
                     double abs_tol = 1e-13);

inline constexpr std::string_view kUnmatched = "UNMATCHED";
inline constexpr std::string_view kNotSteady = "NOT_STEADY";

struct BasinResult {
  std::map<std::string, double> fractions;  ///< label token -> fraction of starts
  std::vector<std::string> outcomes;        ///< per start, in start order
  std::vector<Vec3> starts;
};

/// Integrates from n quasi-random starts in (0, 2 max k]^3 and attributes each
/// steady terminus to the nearest equilibrium of find_all_equilibria within 1e-4.
BasinResult basin_sample(TopologyId topo, const ModelParams& params, int n, std::uint64_t seed, double t_end = 2000.0);

}  // namespace metapop
