#include "metapop/model.hpp"

#include "metapop/errors.hpp"

#include <cmath>
#include <sstream>

namespace metapop {

namespace {

constexpr std::array<std::string_view, 12> kParamNames = {
    "r1", "r2", "r3", "k1", "k2", "k3", "m12", "m13", "m21", "m23", "m31", "m32"};

// (into, from) for the migration tokens, in ParamId order starting at M12.
constexpr std::array<std::array<int, 2>, 6> kMigrationIndex = {
    {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};

void check_inputs(const ModelParams& params, const ModelState& state) {
  for (int i = 0; i < 3; ++i) {
    if (!(params.k(i) > 0.0)) {
      std::ostringstream os;
      os << "carrying capacity k" << (i + 1) << " = " << params.k(i) << " must be positive";
      throw DomainError(os.str());
    }
    if (!(state(i) >= -kStateSlack)) {
      std::ostringstream os;
      os << "state component P" << (i + 1) << " = " << state(i) << " is negative";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

std::string_view to_string(ParamId p) { return kParamNames[static_cast<std::size_t>(p)]; }

std::optional<ParamId> parse_param(std::string_view token) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    if (kParamNames[i] == token) return kAllParams[i];
  }
  return std::nullopt;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid model parameters:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

ModelParams ModelParams::make(const Vec3& r, const Vec3& k, const Mat3& m) {
  std::vector<std::string> bad;
  auto fmt = [](std::string_view name, double v, std::string_view rule) {
    std::ostringstream os;
    os << name << " = " << v << " " << rule;
    return os.str();
  };
  for (int i = 0; i < 3; ++i) {
    const std::string idx = std::to_string(i + 1);
    if (!(r(i) > 0.0) || !std::isfinite(r(i))) bad.push_back(fmt("r" + idx, r(i), "must be positive"));
    if (!(k(i) > 0.0) || !std::isfinite(k(i))) bad.push_back(fmt("k" + idx, k(i), "must be positive"));
    for (int j = 0; j < 3; ++j) {
      const std::string name = "m" + std::to_string(i + 1) + std::to_string(j + 1);
      if (i == j) {
        if (m(i, j) != 0.0) bad.push_back(fmt(name, m(i, j), "must be zero (diagonal)"));
      } else if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
        bad.push_back(fmt(name, m(i, j), "must be nonnegative"));
      }
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return ModelParams(r, k, m, true);
}

ModelParams ModelParams::unchecked(const Vec3& r, const Vec3& k, const Mat3& m) {
  return ModelParams(r, k, m, false);
}

double ModelParams::outflow(int i) const { return m_.col(i).sum() - m_(i, i); }

double ModelParams::get(ParamId p) const {
  const auto idx = static_cast<int>(p);
  if (idx < 3) return r_(idx);
  if (idx < 6) return k_(idx - 3);
  const auto& [into, from] = kMigrationIndex[static_cast<std::size_t>(idx - 6)];
  return m_(into, from);
}

ModelParams ModelParams::with(ParamId p, double value) const {
  Vec3 r = r_;
  Vec3 k = k_;
  Mat3 m = m_;
  const auto idx = static_cast<int>(p);
  if (idx < 3) {
    r(idx) = value;
  } else if (idx < 6) {
    k(idx - 3) = value;
  } else {
    const auto& [into, from] = kMigrationIndex[static_cast<std::size_t>(idx - 6)];
    m(into, from) = value;
  }
  return validated_ ? make(r, k, m) : unchecked(r, k, m);
}

ModelParams ModelParams::with_migration(int into, int from, double value) const {
  Mat3 m = m_;
  m(into, from) = value;
  return validated_ ? make(r_, k_, m) : unchecked(r_, k_, m);
}

Vec3 rhs(const ModelParams& params, const ModelState& state) {
  check_inputs(params, state);
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const double p = state(i);
    double inflow = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) inflow += params.m(i, j) * state(j);
    }
#ifdef METAPOP_INJECT_RHS_SIGN_BUG
    const double outflow = -params.outflow(i) * p;
#else
    const double outflow = params.outflow(i) * p;
#endif
    out(i) = params.r(i) * p * (1.0 - p / params.k(i)) + inflow - outflow;
  }
  return out;
}

Mat3 jacobian(const ModelParams& params, const ModelState& state) {
  check_inputs(params, state);
  Mat3 jac = params.m();
  for (int i = 0; i < 3; ++i) {
    jac(i, i) = params.r(i) * (1.0 - 2.0 * state(i) / params.k(i)) - params.outflow(i);
  }
  return jac;
}

GrowthTerm growth_terms(const ModelParams& params, const ModelState& state) {
  check_inputs(params, state);
  GrowthTerm g;
  for (int i = 0; i < 3; ++i) g.pi(i) = params.r(i) * (1.0 - 2.0 * state(i) / params.k(i));
  return g;
}

double residual(const ModelParams& params, const ModelState& state) {
  return rhs(params, state).cwiseAbs().maxCoeff();
}

}  // namespace metapop
