#pragma once

#include "metapop/model.hpp"
#include "metapop/topology.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metapop {

enum class EqLabel {
  Origin,
  Coex,
  XEx2N,
  Q1,
  M2Ex8,
  I2,
  I3,
  W2,
  W3,
  X1,
  X2,
  Y3,
  Z1,
  Z2,
  Z3,
  Numerical,
};

std::string_view to_string(EqLabel label);
std::optional<EqLabel> parse_label(std::string_view token);

struct EquilibriumRecord {
  Vec3 point = Vec3::Zero();
  EqLabel label = EqLabel::Numerical;
  bool feasible = false;
  double residual = 0.0;  ///< max-norm of rhs at point
  /// Disagreements between sign checks and stated conditions, degenerate inputs.
  std::vector<std::string> diagnostics;
};

/// Which patches are free (occupied) in a restricted solve. Fixed patches stay at 0.
using Support = std::array<bool, 3>;

inline constexpr Support kInterior = {true, true, true};

Support support_of(const Vec3& point);

enum class NewtonStatus { Converged, MaxIterations, Singular, Stalled, NotEquilibrium };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::MaxIterations;
  Vec3 point = Vec3::Zero();
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on rhs restricted to the free patches of `support`. Steps that
/// would leave the open positive orthant (on the free patches) are halved, then
/// backtracked until the residual decreases. Converged means the full rhs
/// max-norm (fixed patches included) is <= tol.
NewtonResult newton_solve(const ModelParams& params, const Vec3& start, const Support& support, double tol,
                          int max_iter);

/// Interior equilibrium by damped Newton from a strictly positive start.
/// Throws NonConvergenceError or SingularJacobianError.
EquilibriumRecord newton_coexistence(const ModelParams& params, const ModelState& start, double tol = 1e-10,
                                     int max_iter = 200);

/// Point Q_h = (P1, P2) where the feasible branches of the two level-h parabolae meet.
struct LevelIntersection {
  double p1;
  double p2;
};

/// Intersection of the feasible branches of sigma_h and rho_h for P3 = h.
/// Requires m12 > 0 and m21 > 0.
LevelIntersection level_intersection(const ModelParams& params, double h);

/// Upper sheet P3^+(P1, P2) of the third equilibrium equation.
double upper_sheet_p3(const ModelParams& params, double p1, double p2);

/// Coexistence equilibrium of the fully connected model by geometric construction:
/// follow the line of level intersections Q_h and bisect h until it meets the upper sheet.
/// Throws PreconditionError if m12, m13, m21 or m23 is zero and BracketFailureError
/// if no sign change is found on [0, 10 max k].
EquilibriumRecord coexistence_by_construction(const ModelParams& params, double h_tol = 1e-13);

/// Multi-start Newton over every face of the orthant; records labeled NUMERICAL
/// (ORIGIN for the zero point). Deterministic for a given seed.
std::vector<EquilibriumRecord> brute_force_equilibria(const ModelParams& params, int n_starts, std::uint64_t seed,
                                                      double tol = 1e-10);

/// Closed-form catalog for `topo`; params must already be projected with apply_topology.
/// Records carry feasibility; infeasible ones are returned too.
std::vector<EquilibriumRecord> closed_form_equilibria(TopologyId topo, const ModelParams& params);

struct FindOptions {
  int n_starts = 16;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double dedup = 1e-6;
};

/// Feasible closed-form equilibria united with the brute-force set, polished to tol.
/// Interior points without a closed form are labeled COEX. Throws ConsistencyError
/// when a feasible closed-form equilibrium is not reproduced numerically.
std::vector<EquilibriumRecord> find_all_equilibria(TopologyId topo, const ModelParams& params,
                                                   const FindOptions& options = {});

/// Closed-form labels a topology can produce (ORIGIN and COEX included).
std::vector<EqLabel> admitted_labels(TopologyId topo);

}  // namespace metapop
