#include "metapop/stability.hpp"

#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace metapop {

namespace {

class Rows {
 public:
  Rows& less(std::string id, double lhs, double rhs, ConditionKind kind = ConditionKind::Stability) {
    return push(std::move(id), kind, '<', lhs, rhs, lhs < rhs);
  }
  Rows& greater(std::string id, double lhs, double rhs, ConditionKind kind = ConditionKind::Stability) {
    return push(std::move(id), kind, '>', lhs, rhs, lhs > rhs);
  }
  /// An explicit eigenvalue that must be negative.
  Rows& negative(std::string id, double eigenvalue) { return less(std::move(id), eigenvalue, 0.0); }
  /// A displayed expression that must be positive.
  Rows& positive(std::string id, double value) { return greater(std::move(id), value, 0.0); }

  std::vector<ConditionRow> take() { return std::move(rows_); }

 private:
  Rows& push(std::string id, ConditionKind kind, char rel, double lhs, double rhs, bool holds) {
    rows_.push_back({std::move(id), kind, rel, lhs, rhs, holds});
    return *this;
  }
  std::vector<ConditionRow> rows_;
};

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Stable: return "STABLE";
    case Classification::Unstable: return "UNSTABLE";
    case Classification::Marginal: return "MARGINAL";
  }
  return "?";
}

std::string_view to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::Stability: return "stability";
    case ConditionKind::Feasibility: return "feasibility";
    case ConditionKind::SignTest: return "sign_test";
  }
  return "?";
}

SignConditions paper_sign_conditions(const CharacteristicCoefficients& c) {
  return {c.trace < 0.0, c.minor_sum > 0.0, c.det < 0.0};
}

bool routh_hurwitz(const CharacteristicCoefficients& c) {
  return -c.trace > 0.0 && -c.det > 0.0 && (-c.trace) * c.minor_sum > -c.det;
}

Classification classify_eigenvalues(const std::array<Complex, 3>& eigenvalues) {
  double scale = 0.0;
  for (const auto& l : eigenvalues) scale = std::max(scale, std::abs(l));
  const double margin = std::max(1e-12, 1e-9 * scale);
  bool all_negative = true;
  for (const auto& l : eigenvalues) {
    if (l.real() > margin) return Classification::Unstable;
    if (!(l.real() < -margin)) all_negative = false;
  }
  return all_negative ? Classification::Stable : Classification::Marginal;
}

std::optional<bool> StabilityReport::stated_stable() const {
  std::optional<bool> out;
  for (const auto& row : conditions) {
    if (row.kind != ConditionKind::Stability) continue;
    out = out.value_or(true) && row.holds;
  }
  return out;
}

double StabilityReport::min_condition_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : conditions) {
    if (row.kind != ConditionKind::SignTest) m = std::min(m, row.margin());
  }
  return m;
}

std::vector<ConditionRow> closed_form_conditions(TopologyId topo, EqLabel label, const Vec3& pt,
                                                 const ModelParams& p) {
  const double r1 = p.r(0), r2 = p.r(1), r3 = p.r(2);
  const double k1 = p.k(0), k2 = p.k(1), k3 = p.k(2);
  const double m12 = p.m(0, 1), m13 = p.m(0, 2), m21 = p.m(1, 0);
  const double m23 = p.m(1, 2), m31 = p.m(2, 0), m32 = p.m(2, 1);
  const double P1 = pt(0), P2 = pt(1), P3 = pt(2);
  const auto F = ConditionKind::Feasibility;

  Rows rows;
  switch (topo) {
    case TopologyId::Ex2N:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J22", r2);
      } else if (label == EqLabel::XEx2N) {
        // Outflow from patch 3 is m13 + m23 in this configuration.
        rows.negative("eig_X.J22", -r2)
            .greater("X_stab_mod7bis.1", m31 + m23 + m13, r3 + r1)
            .greater("X_stab_mod7bis.2", (m31 - r1) * (m23 + m13 - r3), m13 * m31);
      }
      break;

    case TopologyId::Ex7:
    case TopologyId::Ex7N:
      if (label == EqLabel::Origin) {
        rows.greater("stab_orig_mod7bis.1", m12 + m32, r2)
            .greater("stab_orig_mod7bis.2", m13 + m31, r1 + r3)
            .greater("stab_orig_mod7bis.3", r1 * r3, r1 * m13 + r3 * m31);
      } else if (label == EqLabel::Coex) {
        const double a = r1 / k1 * P1 + m12 * P2 / P1;
        const double b = r3 / k3 * P3 + m32 * P2 / P3;
        rows.greater("stab_1_mod7bis", m12 + m32 + 2.0 * r2 / k2 * P2, r2)
            .positive("rh_coex_7.trace", a + m13 * P3 / P1 + b + m31 * P1 / P3)
            .positive("rh_coex_7.det", a * b + m13 * P3 / P1 * b + m31 * P1 / P3 * a);
      } else if (label == EqLabel::Q1) {
        rows.less("Q1_stab_mod7bis", r2, m12 + m32)
            .positive("rh_Q1.trace", m13 / P1 * P3 + r1 / k1 * P1 + m31 / P3 * P1 + r3 / k3 * P3)
            .positive("rh_Q1.det", m13 * r3 / (k3 * P1) * P3 * P3 + m31 * r1 / (k1 * P3) * P1 * P1 +
                                       r1 * r3 / (k1 * k3) * P1 * P3);
      }
      break;

    case TopologyId::Ex8:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J11", r1);
      } else if (label == EqLabel::Coex) {
        rows.less("Stab_8_coex", k1, 2.0 * P1)
            .positive("rh_coex_8.trace", m23 / P2 * P3 + r2 / k2 * P2 + m32 / P3 * P2 + r3 / k3 * P3)
            .positive("rh_coex_8.det", m23 * r3 / (k3 * P2) * P3 * P3 + m32 * r2 / (k2 * P3) * P2 * P2 +
                                           r2 * r3 / (k2 * k3) * P2 * P3);
      } else if (label == EqLabel::M2Ex8) {
        rows.negative("eig_M2.J11", -r1)
            .less("stab_82.1", r2 + r3, m12 + m32 + m13 + m23)
            .greater("stab_82.2", (r2 - m12) * (r3 - m13), (r2 - m12) * m23 + (r3 - m13) * m32);
      }
      break;

    case TopologyId::Ex6:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J11", r1);
      } else if (label == EqLabel::Coex) {
        rows.greater("ce4", r2, m12 + m32, F)
            .negative("eig_coex_6.J11", -(m12 * P2 + m13 * P3) / P1)
            .negative("eig_coex_6.J22", -r2 / k2 * P2)
            .negative("eig_coex_6.J33", -r3 / k3 * P3 - m32 / P3 * P2);
      } else if (label == EqLabel::I2) {
        rows.negative("eig_I2.J11", -r1).less("stab_I2.1", r2, m12 + m32).less("stab_I2.2", r3, m13);
      } else if (label == EqLabel::I3) {
        rows.greater("feas_I3", r3, m13, F)
            .negative("eig_I3.J11", -r1 / k1 * P1 - m13 * P3 / P1)
            .less("stab_I2.1", r2, m12 + m32)
            .negative("eig_I3.J33", -r3 / k3 * P3);
      }
      break;

    case TopologyId::Chain:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J33", r3);
      } else if (label == EqLabel::Coex) {
        rows.negative("eig_coex_n1.J11", -r1 / k1 * P1)
            .negative("eig_coex_n1.J22", -r2 / k2 * P2 - m21 / P2 * P1)
            .negative("eig_coex_n1.J33", -r3 / k3 * P3 - m32 / P3 * P2);
      } else if (label == EqLabel::W2) {
        rows.less("stab_Q2.1", r1, m21).less("stab_Q2.2", r2, m32).negative("eig_W2.J33", -r3);
      } else if (label == EqLabel::W3) {
        rows.less("stab_Q2.1", r1, m21)
            .negative("eig_W3.J22", -r2 / k2 * P2)
            .negative("eig_W3.J33", -m32 / P3 * P2 - r3 / k3 * P3);
      }
      break;

    case TopologyId::Converge:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J22", r2);
      } else if (label == EqLabel::Coex) {
        rows.greater("feas_P*_n2.1", r1, m21, F)
            .greater("feas_P*_n2.2", r3, m23, F)
            .negative("eig_coex_n2.J11", -r1 / k1 * P1)
            .negative("eig_coex_n2.J22", -r2 / k2 * P2 - m21 / P2 * P1 - m23 / P2 * P3)
            .negative("eig_coex_n2.J33", -r3 / k3 * P3);
      } else if (label == EqLabel::X1) {
        // Eigenvalues at (0, k2, 0) are r1 - m21, -r2, r3 - m23.
        rows.less("stab_X1.1", r1, m21).negative("eig_X1.J22", -r2).less("stab_X1.2", r3, m23);
      } else if (label == EqLabel::X2) {
        rows.negative("eig_X2.J11", -r1 / k1 * P1)
            .negative("eig_X2.J22", -r2 / k2 * P2 - m21 / P2 * P1)
            .less("feas_X2", r3, m23);
      } else if (label == EqLabel::Y3) {
        rows.less("feas_Y3", r1, m21)
            .negative("eig_Y3.J22", -r2 / k2 * P2 - m23 / P2 * P3)
            .negative("eig_Y3.J33", -r3 / k3 * P3);
      }
      break;

    case TopologyId::Diverge:
      if (label == EqLabel::Origin) {
        rows.negative("eig_origin.J11", r1);
      } else if (label == EqLabel::Coex) {
        rows.greater("feas_P*_16", r2, m32 + m12, F)
            .negative("eig_coex_n3.J11", -r1 / k1 * P1 - m12 / P1 * P2)
            .negative("eig_coex_n3.J22", -r2 / k2 * P2)
            .negative("eig_coex_n3.J33", -r3 / k3 * P3 - m32 / P3 * P2);
      } else if (label == EqLabel::Z1) {
        rows.negative("eig_Z1.J33", r3);
      } else if (label == EqLabel::Z2) {
        rows.negative("eig_Z2.J11", r1);
      } else if (label == EqLabel::Z3) {
        rows.negative("eig_Z3.J11", -r1).less("stab_Z3", r2, m12 + m32).negative("eig_Z3.J33", -r3);
      }
      break;

    default: break;
  }
  return rows.take();
}

StabilityReport classify(TopologyId topo, const EquilibriumRecord& eq, const ModelParams& params) {
  const double res = std::max(eq.residual, residual(params, eq.point));
  if (!(res <= 1e-8)) {
    std::ostringstream os;
    os << "classify: equilibrium " << to_string(eq.label) << " has residual " << res << " > 1e-8";
    throw StaleEquilibriumError(os.str());
  }
  StabilityReport rep;
  const Mat3 jac = jacobian(params, eq.point);
  rep.coefficients = characteristic(jac);
  rep.eigenvalues = eigenvalues_3x3(jac);
  rep.classification = classify_eigenvalues(rep.eigenvalues);
  rep.sign_test = paper_sign_conditions(rep.coefficients);
  rep.routh_hurwitz = routh_hurwitz(rep.coefficients);

  rep.conditions = closed_form_conditions(topo, eq.label, eq.point, params);
  const auto& c = rep.coefficients;
  rep.conditions.push_back({"traceJ", ConditionKind::SignTest, '<', c.trace, 0.0, rep.sign_test.trace_negative});
  rep.conditions.push_back({"MJ", ConditionKind::SignTest, '>', c.minor_sum, 0.0, rep.sign_test.minor_sum_positive});
  rep.conditions.push_back({"detJ", ConditionKind::SignTest, '<', c.det, 0.0, rep.sign_test.det_negative});
  return rep;
}

std::optional<ModelParams> origin_never_stable_scan(TopologyId topo, int n_draws, std::uint64_t seed) {
  if (n_draws < 1) throw PreconditionError("origin_never_stable_scan requires n_draws >= 1");
  ParamSampler sampler(seed);
  for (int i = 0; i < n_draws; ++i) {
    const ModelParams p = apply_topology(sampler.next(), topo);
    if (classify_eigenvalues(eigenvalues_3x3(jacobian(p, Vec3::Zero()))) == Classification::Stable) return p;
  }
  return std::nullopt;
}

}  // namespace metapop
