#include "metapop/bifurcation.hpp"

#include "metapop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace metapop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_rate(ParamId id) { return id == ParamId::R1 || id == ParamId::R2 || id == ParamId::R3; }
bool is_capacity(ParamId id) { return id == ParamId::K1 || id == ParamId::K2 || id == ParamId::K3; }

ModelParams at(TopologyId topo, const ModelParams& base, ParamId id, double v) {
  return apply_topology(base.with(id, v), topo);
}

std::optional<Vec3> closed_form_point(TopologyId topo, const ModelParams& p, EqLabel label) {
  for (const auto& rec : closed_form_equilibria(topo, p)) {
    if (rec.label == label && rec.point.allFinite()) return rec.point;
  }
  return std::nullopt;
}

int unstable_count(const std::array<Complex, 3>& ev) {
  double scale = 1.0;
  for (const auto& l : ev) scale = std::max(scale, std::abs(l));
  int n = 0;
  for (const auto& l : ev) n += l.real() > 1e-11 * scale;
  return n;
}

// Follows one equilibrium to parameter value v: the closed form when it is still
// feasible, otherwise support-restricted Newton from the previous point.
std::optional<Vec3> continue_to(TopologyId topo, const ModelParams& p, EqLabel label, const Vec3& from) {
  if (label != EqLabel::Numerical) {
    for (const auto& rec : closed_form_equilibria(topo, p)) {
      if (rec.label == label && rec.feasible && rec.residual < 1e-8) return rec.point;
    }
  }
  const NewtonResult res = newton_solve(p, from, support_of(from), 1e-12, 60);
  if (res.status == NewtonStatus::Converged && (res.point - from).norm() < 0.1 * (1.0 + from.norm())) {
    return res.point;
  }
  return std::nullopt;
}

double min_pair_distance(const std::vector<EquilibriumRecord>& eqs) {
  double d = kInf;
  for (std::size_t a = 0; a < eqs.size(); ++a)
    for (std::size_t b = a + 1; b < eqs.size(); ++b) d = std::min(d, (eqs[a].point - eqs[b].point).norm());
  return d;
}

// Index in `next` of the continuation of `eq`, or -1.
int match(const EquilibriumRecord& eq, const std::vector<EquilibriumRecord>& next) {
  if (eq.label != EqLabel::Numerical) {
    int found = -1, count = 0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i].label == eq.label) {
        found = static_cast<int>(i);
        ++count;
      }
    }
    if (count == 1) return found;
  }
  const double cap = 0.5 * min_pair_distance(next);
  int best = -1;
  double best_d = kInf;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double d = (next[i].point - eq.point).norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return (best >= 0 && best_d <= cap) ? best : -1;
}

}  // namespace

std::string_view to_string(HopfValidity v) { return v == HopfValidity::Genuine ? "GENUINE" : "DEGENERATE"; }
std::string_view to_string(CrossingType t) { return t == CrossingType::RealZero ? "REAL_ZERO" : "COMPLEX_PAIR"; }

std::vector<Threshold> transcritical_thresholds(TopologyId topo, const ModelParams& p) {
  const double r3 = p.r(2);
  const double m12 = p.m(0, 1), m13 = p.m(0, 2), m21 = p.m(1, 0);
  const double m23 = p.m(1, 2), m31 = p.m(2, 0), m32 = p.m(2, 1);
  std::vector<Threshold> out;
  auto add = [&](ParamId id, double v, EqLabel a, EqLabel b) {
    if (std::isfinite(v) && v > 0.0) out.push_back({id, v, {a, b}});
  };
  switch (topo) {
    case TopologyId::Ex6:
      add(ParamId::R2, m12 + m32, EqLabel::I2, EqLabel::Coex);
      add(ParamId::R2, m12 + m32, EqLabel::I3, EqLabel::Coex);
      add(ParamId::R3, m13, EqLabel::I2, EqLabel::I3);
      break;
    case TopologyId::Diverge: add(ParamId::R2, m12 + m32, EqLabel::Z3, EqLabel::Coex); break;
    case TopologyId::Chain:
      add(ParamId::R1, m21, EqLabel::W3, EqLabel::Coex);
      add(ParamId::R1, m21, EqLabel::W2, EqLabel::Coex);
      add(ParamId::R2, m32, EqLabel::W2, EqLabel::W3);
      break;
    case TopologyId::Converge:
      add(ParamId::R1, m21, EqLabel::Y3, EqLabel::Coex);
      add(ParamId::R1, m21, EqLabel::X1, EqLabel::X2);
      add(ParamId::R3, m23, EqLabel::X2, EqLabel::Coex);
      add(ParamId::R3, m23, EqLabel::X1, EqLabel::Y3);
      break;
    case TopologyId::Ex7:
    case TopologyId::Ex7N: add(ParamId::R2, m12 + m32, EqLabel::Q1, EqLabel::Coex); break;
    case TopologyId::Ex8: {
      // det of the (2,3) block at M2 vanishes.
      const double d = r3 - m13 - m23;
      if (d != 0.0) add(ParamId::R2, m12 + m32 + m23 * m32 / d, EqLabel::M2Ex8, EqLabel::Coex);
      break;
    }
    case TopologyId::Ex2N: {
      // det of the (1,3) block at X vanishes.
      const double d = r3 - m13 - m23;
      if (d != 0.0) add(ParamId::R1, m31 + m13 * m31 / d, EqLabel::XEx2N, EqLabel::Coex);
      break;
    }
    default: break;
  }
  return out;
}

double exchange_gap(TopologyId topo, const ModelParams& params, const Threshold& t) {
  const ModelParams p = at(topo, params, t.param, t.value);
  const auto a = closed_form_point(topo, p, t.exchange.first);
  const auto b = closed_form_point(topo, p, t.exchange.second);
  if (!a || !b) return kInf;
  return (*a - *b).norm();
}

HopfCandidate hopf_candidate(const ModelParams& params) {
  const double r2 = params.m(0, 2) + params.m(1, 2) + params.m(2, 1) + params.m(0, 1) - params.r(2);
  if (!(r2 > 0.0)) return {r2, HopfValidity::Degenerate};
  const ModelParams p = at(TopologyId::Ex8, params, ParamId::R2, r2);
  const auto ev = eigenvalues_3x3(jacobian(p, Vec3(p.k(0), 0.0, 0.0)));
  double scale = 1.0;
  for (const auto& l : ev) scale = std::max(scale, std::abs(l));
  for (const auto& l : ev) {
    if (std::abs(l.real()) <= 1e-9 * scale && std::abs(l.imag()) > 1e-8) return {r2, HopfValidity::Genuine};
  }
  return {r2, HopfValidity::Degenerate};
}

std::vector<SweepRecord> sweep(TopologyId topo, const ModelParams& params, ParamId param, double lo, double hi,
                               int steps, const SweepOptions& options) {
  std::ostringstream why;
  if (!(lo < hi)) why << "sweep range requires lo < hi (got " << lo << ", " << hi << ")";
  else if (steps < 2) why << "sweep requires steps >= 2 (got " << steps << ")";
  else if ((is_rate(param) || is_capacity(param)) && !(lo > 0.0))
    why << "sweep of " << to_string(param) << " must stay > 0 (lo = " << lo << ")";
  else if (!(lo >= 0.0)) why << "sweep of " << to_string(param) << " must stay >= 0 (lo = " << lo << ")";
  else if (!std::isfinite(hi)) why << "sweep upper bound must be finite";
  if (!why.str().empty()) throw DomainError(why.str());

  std::vector<SweepRecord> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double v = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
    SweepRecord rec{param, v, {}, {}, {}};
    const ModelParams p = at(topo, params, param, v);
    rec.equilibria = find_all_equilibria(topo, p, options.find);
    for (const auto& eq : rec.equilibria) rec.reports.push_back(classify(topo, eq, p));
    out.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    auto& left = out[i];
    const auto& right = out[i + 1];
    for (std::size_t e = 0; e < left.equilibria.size(); ++e) {
      const int j = match(left.equilibria[e], right.equilibria);
      if (j < 0) continue;
      const int n_lo = unstable_count(left.reports[e].eigenvalues);
      const int n_hi = unstable_count(right.reports[static_cast<std::size_t>(j)].eigenvalues);
      if (n_lo == n_hi) continue;

      const EqLabel label = left.equilibria[e].label;
      double a = left.param_value, b = right.param_value;
      Vec3 pt = left.equilibria[e].point;
      bool ok = true;
      while (b - a > options.param_tol) {
        const double mid = 0.5 * (a + b);
        const auto next = continue_to(topo, at(topo, params, param, mid), label, pt);
        if (!next) {
          ok = false;
          break;
        }
        if (unstable_count(eigenvalues_3x3(jacobian(at(topo, params, param, mid), *next))) == n_lo) {
          a = mid;
          pt = *next;
        } else {
          b = mid;
        }
      }
      if (!ok) continue;

      const double vc = 0.5 * (a + b);
      const ModelParams pc = at(topo, params, param, vc);
      const Vec3 pc_pt = continue_to(topo, pc, label, pt).value_or(pt);
      const auto ev = eigenvalues_3x3(jacobian(pc, pc_pt));
      int idx = 0;
      for (int k = 1; k < 3; ++k)
        if (std::abs(ev[k].real()) < std::abs(ev[idx].real())) idx = k;
      const CrossingType type = std::abs(ev[idx].imag()) < 1e-8 ? CrossingType::RealZero : CrossingType::ComplexPair;
      left.crossings.push_back({label, idx, type, vc, pc_pt, ev[idx]});
    }
  }
  return out;
}

}  // namespace metapop
