#pragma once

#include "metapop/equilibria.hpp"
#include "metapop/model.hpp"
#include "metapop/stability.hpp"
#include "metapop/topology.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace metapop {

/// A zero-eigenvalue locus: at `param == value` the equilibria `exchange` swap
/// stability or feasibility.
struct Threshold {
  ParamId param;
  double value;
  std::pair<EqLabel, EqLabel> exchange;
};

/// Analytic transcritical thresholds for `topo` at the remaining parameter values.
/// Loci that are undefined for the given rates (division by zero, non-positive value) are omitted.
std::vector<Threshold> transcritical_thresholds(TopologyId topo, const ModelParams& params);

/// Distance between the closed-form points of the two exchanging equilibria at the threshold.
/// Infinity if either has no finite closed form there.
double exchange_gap(TopologyId topo, const ModelParams& params, const Threshold& t);

enum class HopfValidity { Genuine, Degenerate };
std::string_view to_string(HopfValidity v);

struct HopfCandidate {
  double r2;
  HopfValidity validity;
};

/// Trace-zero locus of the (2,3) block at M2 = (k1, 0, 0) for EX8. GENUINE only if the
/// eigenvalues crossing there form a complex pair.
HopfCandidate hopf_candidate(const ModelParams& params);

enum class CrossingType { RealZero, ComplexPair };
std::string_view to_string(CrossingType t);

struct Crossing {
  EqLabel label;
  int eigen_index;  ///< index into the sorted eigenvalue triple at the crossing
  CrossingType type;
  double param_value;
  Vec3 point;  ///< tracked equilibrium at the crossing
  Complex eigenvalue;  ///< the crossing eigenvalue, evaluated at param_value
};

struct SweepRecord {
  ParamId param;
  double param_value;
  std::vector<EquilibriumRecord> equilibria;
  std::vector<StabilityReport> reports;
  /// Crossings refined inside (param_value, next grid value].
  std::vector<Crossing> crossings;
};

struct SweepOptions {
  FindOptions find;
  double param_tol = 1e-10;  ///< bisection width for crossing refinement
};

/// Grid sweep of one parameter over [lo, hi] with `steps` values. Throws DomainError
/// when lo >= hi, steps < 2 or the range leaves the parameter's validity domain.
std::vector<SweepRecord> sweep(TopologyId topo, const ModelParams& params, ParamId param, double lo, double hi,
                               int steps, const SweepOptions& options = {});

}  // namespace metapop
