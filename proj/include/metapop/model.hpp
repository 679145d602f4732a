#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace metapop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Population levels (P1, P2, P3). Components must be >= -kStateSlack.
using ModelState = Vec3;

/// Round-off allowance for slightly negative states handed in by integrators.
inline constexpr double kStateSlack = 1e-12;

/// Scalar parameters addressable by name in sweeps and configs.
enum class ParamId { R1, R2, R3, K1, K2, K3, M12, M13, M21, M23, M31, M32 };

inline constexpr std::array<ParamId, 12> kAllParams = {
    ParamId::R1,  ParamId::R2,  ParamId::R3,  ParamId::K1,  ParamId::K2,  ParamId::K3,
    ParamId::M12, ParamId::M13, ParamId::M21, ParamId::M23, ParamId::M31, ParamId::M32};

std::string_view to_string(ParamId p);
std::optional<ParamId> parse_param(std::string_view token);

/// Logistic growth rates r, carrying capacities k and migration matrix m of the
/// three-patch model. m(i, j) is the per-capita rate INTO patch i FROM patch j
/// (0-based indices; m(0, 1) is written m12).
class ModelParams {
 public:
  /// Validates r > 0, k > 0, m >= 0 off the diagonal and m(i,i) == 0.
  /// Throws ValidationError listing every violation.
  static ModelParams make(const Vec3& r, const Vec3& k, const Mat3& m);

  /// Skips validation. Test and harness use only (e.g. r = 0 conservation checks).
  static ModelParams unchecked(const Vec3& r, const Vec3& k, const Mat3& m);

  const Vec3& r() const noexcept { return r_; }
  const Vec3& k() const noexcept { return k_; }
  const Mat3& m() const noexcept { return m_; }

  double r(int i) const { return r_(i); }
  double k(int i) const { return k_(i); }
  /// Rate into patch `into` from patch `from`, 0-based.
  double m(int into, int from) const { return m_(into, from); }

  /// Total per-capita emigration rate out of patch i (sum of column i).
  double outflow(int i) const;

  double get(ParamId p) const;
  /// Copy with one parameter replaced; revalidates unless this object was unchecked.
  ModelParams with(ParamId p, double value) const;
  ModelParams with_migration(int into, int from, double value) const;

  bool validated() const noexcept { return validated_; }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.r_ == b.r_ && a.k_ == b.k_ && a.m_ == b.m_;
  }

 private:
  ModelParams(const Vec3& r, const Vec3& k, const Mat3& m, bool validated)
      : r_(r), k_(k), m_(m), validated_(validated) {}

  Vec3 r_;
  Vec3 k_;
  Mat3 m_;
  bool validated_ = false;
};

/// Pi_i = r_i (1 - 2 P_i / k_i).
struct GrowthTerm {
  Vec3 pi;
};

/// Right-hand side of the three-patch logistic migration system:
/// dP_i/dt = r_i P_i (1 - P_i/k_i) + sum_j m_ij P_j - P_i sum_j m_ji.
Vec3 rhs(const ModelParams& params, const ModelState& state);

/// Analytic Jacobian: off-diagonal m_ij, diagonal Pi_i - outflow_i.
Mat3 jacobian(const ModelParams& params, const ModelState& state);

GrowthTerm growth_terms(const ModelParams& params, const ModelState& state);

/// Max-norm of rhs.
double residual(const ModelParams& params, const ModelState& state);

}  // namespace metapop
