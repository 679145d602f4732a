#pragma once

#include "metapop/equilibria.hpp"
#include "metapop/model.hpp"
#include "metapop/topology.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metapop {

using Complex = std::complex<double>;

/// Roots of x^3 + a x^2 + b x + c by the trigonometric / Cardano formulas, each
/// polished by one Newton step. Sorted by real part descending, then imaginary part descending.
std::array<Complex, 3> cubic_roots(double a, double b, double c);

/// Coefficients of the characteristic cubic  lambda^3 - trace lambda^2 + minor_sum lambda - det.
struct CharacteristicCoefficients {
  double trace = 0.0;
  double minor_sum = 0.0;  ///< sum of the three principal 2x2 minors
  double det = 0.0;
};

CharacteristicCoefficients characteristic(const Mat3& j);

std::array<Complex, 3> eigenvalues_3x3(const Mat3& j);

/// The sign test tr < 0, M_J > 0, det < 0 (necessary, not sufficient, for stability).
struct SignConditions {
  bool trace_negative = false;
  bool minor_sum_positive = false;
  bool det_negative = false;

  bool all() const { return trace_negative && minor_sum_positive && det_negative; }
};

SignConditions paper_sign_conditions(const CharacteristicCoefficients& c);

/// Full Routh–Hurwitz test for the cubic: -tr > 0, -det > 0, (-tr) M_J > -det.
bool routh_hurwitz(const CharacteristicCoefficients& c);

enum class Classification { Stable, Unstable, Marginal };

std::string_view to_string(Classification c);

/// STABLE if every real part < -margin, UNSTABLE if one > margin, MARGINAL otherwise;
/// margin = max(1e-12, 1e-9 * max |lambda|).
Classification classify_eigenvalues(const std::array<Complex, 3>& eigenvalues);

enum class ConditionKind {
  Stability,    ///< part of the closed-form stability criterion for this equilibrium
  Feasibility,  ///< closed-form existence condition
  SignTest,     ///< coefficient sign test (traceJ, MJ, detJ)
};

std::string_view to_string(ConditionKind k);

/// One evaluated inequality `lhs relation rhs`; relation is '<' or '>'.
struct ConditionRow {
  std::string id;
  ConditionKind kind = ConditionKind::Stability;
  char relation = '<';
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;

  double margin() const { return std::abs(lhs - rhs); }
};

struct StabilityReport {
  std::array<Complex, 3> eigenvalues{};
  CharacteristicCoefficients coefficients;
  Classification classification = Classification::Marginal;
  std::vector<ConditionRow> conditions;
  SignConditions sign_test;
  bool routh_hurwitz = false;

  /// Conjunction of the Stability rows, or nullopt when no closed-form criterion applies.
  std::optional<bool> stated_stable() const;
  /// Smallest margin over Stability and Feasibility rows (infinity if none).
  double min_condition_margin() const;
};

/// Jacobian eigenvalues at the equilibrium plus every closed-form condition that
/// applies to (topo, eq.label). Throws StaleEquilibriumError if the residual exceeds 1e-8.
StabilityReport classify(TopologyId topo, const EquilibriumRecord& eq, const ModelParams& params);

/// The closed-form condition rows alone (no eigenvalue work).
std::vector<ConditionRow> closed_form_conditions(TopologyId topo, EqLabel label, const Vec3& point,
                                                 const ModelParams& params);

/// Random search for parameters making the origin STABLE under `topo`; the first
/// counterexample by draw index, or nullopt.
std::optional<ModelParams> origin_never_stable_scan(TopologyId topo, int n_draws, std::uint64_t seed);

}  // namespace metapop
