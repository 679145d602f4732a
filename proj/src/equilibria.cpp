#include "metapop/equilibria.hpp"

#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace metapop {

namespace {

constexpr std::array<std::string_view, 16> kLabelNames = {"ORIGIN", "COEX", "X_EX2N", "Q1", "M2_EX8", "I2",
                                                          "I3",     "W2",   "W3",     "X1", "X2",     "Y3",
                                                          "Z1",     "Z2",   "Z3",     "NUMERICAL"};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Nonnegative root of a x^2 - b x - c = 0 (a > 0); the larger root, computed without cancellation.
double larger_root(double a, double b, double c) {
  const double disc = b * b + 4.0 * a * c;
  if (disc < 0.0) return kNaN;
  const double s = std::sqrt(disc);
  if (b >= 0.0) return (b + s) / (2.0 * a);
  return (s - b) > 0.0 ? 2.0 * c / (s - b) : 0.0;
}

// Largest root P of r P (1 - P/k) - loss P + inflow = 0, i.e.
// P = k/(2r) [ (r - loss) + sqrt((r - loss)^2 + 4 r inflow / k) ].
double logistic_root(double r, double k, double loss, double inflow) {
  return larger_root(r / k, r - loss, inflow);
}

// d/d(inflow) of logistic_root.
double logistic_root_slope(double r, double k, double loss, double inflow) {
  const double b = r - loss;
  return 1.0 / std::sqrt(b * b + 4.0 * (r / k) * inflow);
}

// Largest root of a convex function that is <= 0 at `lo` and grows without bound,
// by Newton iteration from the right (monotone for convex functions).
double largest_convex_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                           double lo, double scale) {
  double x = std::max(lo, 0.0) + std::max(scale, 1e-12);
  for (int i = 0; i < 200 && !(f(x) > 0.0); ++i) x = lo + 2.0 * (x - lo);
  if (!(f(x) > 0.0)) return kNaN;
  for (int i = 0; i < 400; ++i) {
    const double fx = f(x);
    if (!(fx > 0.0)) break;
    const double d = df(x);
    if (!(d > 0.0)) break;
    const double next = std::max(lo, x - fx / d);
    if (!(next < x) || x - next <= 4e-16 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double safe_residual(const ModelParams& params, const Vec3& p) {
  if (!p.allFinite() || (p.array() < -kStateSlack).any()) return std::numeric_limits<double>::infinity();
  return residual(params, p);
}

// Two solutions within `dedup` are one equilibrium. Near a fold or transcritical
// point Newton stops up to ~sqrt(tol) away from the root, so farther pairs are
// merged too when the residual stays at the tolerance level along the segment.
bool same_equilibrium(const ModelParams& params, const Vec3& a, const Vec3& b, double tol, double dedup) {
  const double d = (a - b).norm();
  if (d < dedup) return true;
  if (d > 1e-3 * (1.0 + a.norm())) return false;
  for (double t : {0.25, 0.5, 0.75}) {
    if (safe_residual(params, a + t * (b - a)) > 2.0 * tol) return false;
  }
  return true;
}

struct Requirement {
  std::string id;
  double lhs;
  double rhs;  // holds iff lhs > rhs
};

class CatalogBuilder {
 public:
  explicit CatalogBuilder(const ModelParams& p) : p_(p) {}

  void add(EqLabel label, const Vec3& point, std::vector<Requirement> reqs = {}) {
    EquilibriumRecord rec;
    rec.label = label;
    rec.point = point;
    bool sign_ok = point.allFinite();
    for (int i = 0; i < 3 && sign_ok; ++i) sign_ok = point(i) >= 0.0;
    // Structurally positive components must be strictly positive.
    if (sign_ok && label != EqLabel::Origin) sign_ok = (point.array() > 0.0).any();
    bool cond_ok = true;
    double min_margin = std::numeric_limits<double>::infinity();
    std::string failing;
    for (const auto& r : reqs) {
      const bool holds = r.lhs > r.rhs;
      min_margin = std::min(min_margin, std::abs(r.lhs - r.rhs));
      if (!holds) {
        cond_ok = false;
        if (!failing.empty()) failing += ", ";
        failing += r.id;
      }
    }
    rec.feasible = sign_ok && cond_ok;
    if (sign_ok != cond_ok && min_margin > 1e-9) {
      std::ostringstream os;
      os << "sign check " << (sign_ok ? "passes" : "fails") << " but stated condition(s) "
         << (cond_ok ? "hold" : "fail: " + failing);
      rec.diagnostics.push_back(os.str());
    }
    rec.residual = safe_residual(p_, point);
    out_.push_back(std::move(rec));
  }

  std::vector<EquilibriumRecord>& records() { return out_; }

 private:
  const ModelParams& p_;
  std::vector<EquilibriumRecord> out_;
};

// Intersection of the feasible branches of the two parabolae obtained from the
// first and third equilibrium equations when P2 = p2 is fixed:
//   P3 = [ (r1/k1) P1^2 + (m31 - r1) P1 - m12 p2 ] / m13,
//   P1 = [ (r3/k3) P3^2 + (m13 - r3) P3 - m32 p2 ] / m31.
// Returns (P1, P3), NaN when the rates needed are zero.
std::array<double, 2> patch13_intersection(const ModelParams& p, double p2) {
  const double r1 = p.r(0), k1 = p.k(0), r3 = p.r(2), k3 = p.k(2);
  const double m13 = p.m(0, 2), m31 = p.m(2, 0), m12 = p.m(0, 1), m32 = p.m(2, 1);
  if (!(m13 > 0.0) || !(m31 > 0.0)) return {kNaN, kNaN};
  auto p3_from_eq1 = [&](double p1) { return ((r1 / k1) * p1 * p1 + (m31 - r1) * p1 - m12 * p2) / m13; };
  auto p3_from_eq3 = [&](double p1) { return logistic_root(r3, k3, m13, m31 * p1 + m32 * p2); };
  auto psi = [&](double p1) { return p3_from_eq1(p1) - p3_from_eq3(p1); };
  auto dpsi = [&](double p1) {
    return (2.0 * (r1 / k1) * p1 + m31 - r1) / m13 - m31 * logistic_root_slope(r3, k3, m13, m31 * p1 + m32 * p2);
  };
  // Feasible branch of the first parabola starts where it crosses P3 = 0.
  const double lo = logistic_root(r1, k1, m31, m12 * p2);
  if (!std::isfinite(lo)) return {kNaN, kNaN};
  const double p1 = largest_convex_root(psi, dpsi, lo, k1);
  return {p1, p3_from_eq3(p1)};
}

void closed_form_ex7(const ModelParams& p, CatalogBuilder& b) {
  const double r2 = p.r(1), k2 = p.k(1);
  const double m12 = p.m(0, 1), m32 = p.m(2, 1), m13 = p.m(0, 2), m31 = p.m(2, 0);
  const double r1 = p.r(0), r3 = p.r(2);

  // Patch 2 only emits, so P2 is either 0 or k2 (r2 - m12 - m32) / r2.
  const double p2 = k2 * (r2 - m12 - m32) / r2;
  if (p2 > 0.0) {
    const auto [p1, p3] = patch13_intersection(p, p2);
    b.add(EqLabel::Coex, Vec3(p1, p2, p3));
    if (!std::isfinite(p1)) b.records().back().diagnostics.push_back("m13 or m31 is zero; no parabola intersection");
  } else {
    b.add(EqLabel::Coex, Vec3(kNaN, p2, kNaN));
  }

  const auto [q1, q3] = patch13_intersection(p, 0.0);
  const bool trivial = !(q1 > 1e-12 * p.k(0)) || !(q3 > 1e-12 * p.k(2));
  b.add(EqLabel::Q1, trivial ? Vec3(kNaN, 0.0, kNaN) : Vec3(q1, 0.0, q3));
  auto& rec = b.records().back();
  if (rec.feasible && r1 < m31 && r3 < m13) {
    rec.diagnostics.push_back(
        "Q1 exists although zeros_restr_2 (r1<m31, r3<m13) holds; the printed slope test predicts infeasibility");
  }
}

void closed_form_ex6(const ModelParams& p, CatalogBuilder& b) {
  const double r1 = p.r(0), r2 = p.r(1), r3 = p.r(2);
  const double k1 = p.k(0), k2 = p.k(1), k3 = p.k(2);
  const double m12 = p.m(0, 1), m13 = p.m(0, 2), m32 = p.m(2, 1);

  b.add(EqLabel::I2, Vec3(k1, 0.0, 0.0));

  const double beta = k3 / r3 * (r3 - m13);
  const double alpha = logistic_root(r1, k1, 0.0, m13 * beta);
  b.add(EqLabel::I3, Vec3(alpha, 0.0, beta), {{"feas_I3", r3, m13}});

  const double p2 = k2 / r2 * (r2 - m32 - m12);
  const double p3 = logistic_root(r3, k3, m13, m32 * p2);
  const double p1 = logistic_root(r1, k1, 0.0, m12 * p2 + m13 * p3);
  b.add(EqLabel::Coex, Vec3(p1, p2, p3), {{"ce4", r2, m12 + m32}});
}

void closed_form_chain(const ModelParams& p, CatalogBuilder& b) {
  const double r1 = p.r(0), r2 = p.r(1), r3 = p.r(2);
  const double k1 = p.k(0), k2 = p.k(1), k3 = p.k(2);
  const double m21 = p.m(1, 0), m32 = p.m(2, 1);

  b.add(EqLabel::W2, Vec3(0.0, 0.0, k3));

  const double p2w = k2 / r2 * (r2 - m32);
  b.add(EqLabel::W3, Vec3(0.0, p2w, logistic_root(r3, k3, 0.0, m32 * p2w)));

  const double p1 = k1 / r1 * (r1 - m21);
  const double p2 = logistic_root(r2, k2, m32, m21 * p1);
  const double p3 = logistic_root(r3, k3, 0.0, m32 * p2);
  b.add(EqLabel::Coex, Vec3(p1, p2, p3));
}

void closed_form_converge(const ModelParams& p, CatalogBuilder& b) {
  const double r1 = p.r(0), r2 = p.r(1), r3 = p.r(2);
  const double k1 = p.k(0), k2 = p.k(1), k3 = p.k(2);
  const double m21 = p.m(1, 0), m23 = p.m(1, 2);

  b.add(EqLabel::X1, Vec3(0.0, k2, 0.0));

  const double p1 = k1 / r1 * (r1 - m21);
  const double p3 = k3 / r3 * (r3 - m23);
  b.add(EqLabel::X2, Vec3(p1, logistic_root(r2, k2, 0.0, m21 * p1), 0.0));
  b.add(EqLabel::Y3, Vec3(0.0, logistic_root(r2, k2, 0.0, m23 * p3), p3));
  b.add(EqLabel::Coex, Vec3(p1, logistic_root(r2, k2, 0.0, m21 * p1 + m23 * p3), p3),
        {{"feas_P*_n2.1", r1, m21}, {"feas_P*_n2.2", r3, m23}});
}

void closed_form_diverge(const ModelParams& p, CatalogBuilder& b) {
  const double r1 = p.r(0), r2 = p.r(1), r3 = p.r(2);
  const double k1 = p.k(0), k2 = p.k(1), k3 = p.k(2);
  const double m12 = p.m(0, 1), m32 = p.m(2, 1);

  b.add(EqLabel::Z1, Vec3(k1, 0.0, 0.0));
  b.add(EqLabel::Z2, Vec3(0.0, 0.0, k3));
  b.add(EqLabel::Z3, Vec3(k1, 0.0, k3));

  // P3* is driven by the inflow m32 P2*, not m32 P3*.
  const double p2 = k2 / r2 * (r2 - m12 - m32);
  b.add(EqLabel::Coex,
        Vec3(logistic_root(r1, k1, 0.0, m12 * p2), p2, logistic_root(r3, k3, 0.0, m32 * p2)),
        {{"feas_P*_16", r2, m12 + m32}});
}

}  // namespace

std::string_view to_string(EqLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }

std::optional<EqLabel> parse_label(std::string_view token) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == token) return static_cast<EqLabel>(i);
  }
  return std::nullopt;
}

LevelIntersection level_intersection(const ModelParams& p, double h) {
  const double r1 = p.r(0), k1 = p.k(0), r2 = p.r(1), k2 = p.k(1);
  const double m12 = p.m(0, 1), m13 = p.m(0, 2), m21 = p.m(1, 0), m23 = p.m(1, 2);
  const double loss1 = p.m(1, 0) + p.m(2, 0);
  const double loss2 = p.m(0, 1) + p.m(2, 1);
  if (!(m12 > 0.0) || !(m21 > 0.0)) throw PreconditionError("level_intersection requires m12 > 0 and m21 > 0");
  if (!(h >= 0.0)) throw DomainError("level_intersection requires h >= 0");

  // rho_h:   P1 = [ (r2/k2) P2^2 - (r2 - loss2) P2 - m23 h ] / m21, feasible for P2 >= p2_lo.
  // sigma_h: P2 = [ (r1/k1) P1^2 - (r1 - loss1) P1 - m13 h ] / m12, feasible branch inverted to P1(P2).
  auto p1_rho = [&](double p2) { return ((r2 / k2) * p2 * p2 - (r2 - loss2) * p2 - m23 * h) / m21; };
  auto p1_sigma = [&](double p2) { return logistic_root(r1, k1, loss1, m13 * h + m12 * p2); };
  auto psi = [&](double p2) { return p1_rho(p2) - p1_sigma(p2); };
  auto dpsi = [&](double p2) {
    return (2.0 * (r2 / k2) * p2 - (r2 - loss2)) / m21 - m12 * logistic_root_slope(r1, k1, loss1, m13 * h + m12 * p2);
  };
  const double p2_lo = logistic_root(r2, k2, loss2, m23 * h);
  const double p2 = largest_convex_root(psi, dpsi, p2_lo, k2 + h);
  return {p1_sigma(p2), p2};
}

double upper_sheet_p3(const ModelParams& p, double p1, double p2) {
  return logistic_root(p.r(2), p.k(2), p.m(0, 2) + p.m(1, 2), p.m(2, 0) * p1 + p.m(2, 1) * p2);
}

EquilibriumRecord coexistence_by_construction(const ModelParams& params, double h_tol) {
  for (auto [into, from, name] : {std::tuple{0, 1, "m12"}, {0, 2, "m13"}, {1, 0, "m21"}, {1, 2, "m23"}}) {
    if (!(params.m(into, from) > 0.0)) {
      throw PreconditionError(std::string("coexistence_by_construction requires ") + name + " > 0");
    }
  }
  if (!(h_tol > 0.0)) throw PreconditionError("coexistence_by_construction requires h_tol > 0");

  auto gap = [&](double h) {
    const auto q = level_intersection(params, h);
    return upper_sheet_p3(params, q.p1, q.p2) - h;
  };

  const double h_max = 10.0 * params.k().maxCoeff();
  constexpr int kGrid = 400;
  double lo = -1.0, hi = -1.0;
  double prev_h = 0.0;
  double prev_g = gap(0.0);
  for (int i = 1; i <= kGrid && hi < 0.0; ++i) {
    const double t = static_cast<double>(i) / kGrid;
    const double h = h_max * t * t * t;
    const double g = gap(h);
    if (prev_g > 0.0 && g <= 0.0) {
      lo = prev_h;
      hi = h;
    } else if (i == 1 && prev_g <= 0.0 && g <= 0.0) {
      // Q_0 sits on the zero sheet; look for the positive branch just above h = 0.
      for (double hh = h / 2.0; hh > 1e-300; hh /= 2.0) {
        if (gap(hh) > 0.0) {
          lo = hh;
          hi = 2.0 * hh;
          break;
        }
      }
    }
    prev_h = h;
    prev_g = g;
  }
  if (hi < 0.0) {
    std::ostringstream os;
    os << "coexistence_by_construction: no sign change of Sigma+(Q_h) - h on [0, " << h_max << "]";
    throw BracketFailureError(os.str());
  }
  while (hi - lo > h_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  const double h = 0.5 * (lo + hi);
  const auto q = level_intersection(params, h);

  EquilibriumRecord rec;
  rec.label = EqLabel::Coex;
  rec.point = Vec3(q.p1, q.p2, h);
  rec.feasible = (rec.point.array() >= 0.0).all();
  rec.residual = safe_residual(params, rec.point);
  return rec;
}

std::vector<EquilibriumRecord> brute_force_equilibria(const ModelParams& params, int n_starts, std::uint64_t seed,
                                                      double tol) {
  if (n_starts < 1) throw PreconditionError("brute_force_equilibria requires n_starts >= 1");
  const double kmax = params.k().maxCoeff();
  std::vector<Vec3> starts =
      quasi_random_points(static_cast<std::size_t>(n_starts), seed, Vec3::Zero(), Vec3::Constant(2.0 * kmax));
  for (int c = 0; c < 8; ++c) {
    Vec3 s;
    for (int i = 0; i < 3; ++i) s(i) = ((c >> i) & 1) ? 2.0 * kmax : 0.05 * params.k(i);
    starts.push_back(s);
  }

  struct Candidate {
    Vec3 point;
    double residual;
  };
  std::vector<Candidate> found{{Vec3::Zero(), 0.0}};
  for (int mask = 1; mask < 8; ++mask) {
    const Support support = {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
    for (const auto& s : starts) {
      const NewtonResult res = newton_solve(params, s, support, tol, 100);
      if (res.status == NewtonStatus::Converged) found.push_back({res.point, res.residual});
    }
  }

  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    return std::lexicographical_compare(a.point.data(), a.point.data() + 3, b.point.data(), b.point.data() + 3);
  });
  std::vector<Candidate> clusters;
  for (const auto& c : found) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const Candidate& k) { return same_equilibrium(params, k.point, c.point, tol, 1e-6); });
    if (it == clusters.end()) clusters.push_back(c);
    else if (c.residual < it->residual) *it = c;
  }

  std::vector<EquilibriumRecord> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) {
    EquilibriumRecord rec;
    rec.point = c.point;
    rec.label = (c.point.array() == 0.0).all() ? EqLabel::Origin : EqLabel::Numerical;
    rec.feasible = true;
    rec.residual = c.residual;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EquilibriumRecord> closed_form_equilibria(TopologyId topo, const ModelParams& params) {
  CatalogBuilder b(params);
  b.add(EqLabel::Origin, Vec3::Zero());
  switch (topo) {
    case TopologyId::Full:
    case TopologyId::Ex2:
    case TopologyId::Hub0:
    case TopologyId::Ex3:
    case TopologyId::Ex1: break;
    case TopologyId::Ex2N: b.add(EqLabel::XEx2N, Vec3(0.0, params.k(1), 0.0)); break;
    case TopologyId::Ex7:
    case TopologyId::Ex7N: closed_form_ex7(params, b); break;
    case TopologyId::Ex8: b.add(EqLabel::M2Ex8, Vec3(params.k(0), 0.0, 0.0)); break;
    case TopologyId::Ex6: closed_form_ex6(params, b); break;
    case TopologyId::Chain: closed_form_chain(params, b); break;
    case TopologyId::Converge: closed_form_converge(params, b); break;
    case TopologyId::Diverge: closed_form_diverge(params, b); break;
    default: throw UnknownTopologyError("closed_form_equilibria: unknown topology");
  }
  return std::move(b.records());
}

std::vector<EqLabel> admitted_labels(TopologyId topo) {
  switch (topo) {
    case TopologyId::Full:
    case TopologyId::Ex2:
    case TopologyId::Hub0:
    case TopologyId::Ex3:
    case TopologyId::Ex1: return {EqLabel::Origin, EqLabel::Coex};
    case TopologyId::Ex2N: return {EqLabel::Origin, EqLabel::XEx2N, EqLabel::Coex};
    case TopologyId::Ex7:
    case TopologyId::Ex7N: return {EqLabel::Origin, EqLabel::Q1, EqLabel::Coex};
    case TopologyId::Ex8: return {EqLabel::Origin, EqLabel::M2Ex8, EqLabel::Coex};
    case TopologyId::Ex6: return {EqLabel::Origin, EqLabel::I2, EqLabel::I3, EqLabel::Coex};
    case TopologyId::Chain: return {EqLabel::Origin, EqLabel::W2, EqLabel::W3, EqLabel::Coex};
    case TopologyId::Converge: return {EqLabel::Origin, EqLabel::X1, EqLabel::X2, EqLabel::Y3, EqLabel::Coex};
    case TopologyId::Diverge: return {EqLabel::Origin, EqLabel::Z1, EqLabel::Z2, EqLabel::Z3, EqLabel::Coex};
  }
  throw UnknownTopologyError("admitted_labels: unknown topology");
}

std::vector<EquilibriumRecord> find_all_equilibria(TopologyId topo, const ModelParams& params,
                                                   const FindOptions& options) {
  std::vector<EquilibriumRecord> out;
  bool catalog_has_coex = false;
  for (auto& rec : closed_form_equilibria(topo, params)) {
    if (rec.label == EqLabel::Coex) catalog_has_coex = true;
    if (!rec.feasible) continue;
    const NewtonResult res = newton_solve(params, rec.point, support_of(rec.point), options.tol, 50);
    if (res.status == NewtonStatus::Converged) {
      rec.point = res.point;
      rec.residual = res.residual;
    } else if (res.residual < rec.residual) {
      rec.point = res.point;
      rec.residual = res.residual;
    }
    if (rec.residual > options.tol) {
      std::ostringstream os;
      os << "polish stopped at residual " << rec.residual;
      rec.diagnostics.push_back(os.str());
    }
    out.push_back(std::move(rec));
  }

  const auto numeric = brute_force_equilibria(params, options.n_starts, options.seed, options.tol);
  auto near = [&](const Vec3& a, const Vec3& b) {
    return same_equilibrium(params, a, b, std::max(options.tol, 1e-10), options.dedup);
  };

  for (const auto& rec : out) {
    const bool reproduced =
        std::any_of(numeric.begin(), numeric.end(), [&](const EquilibriumRecord& n) { return near(n.point, rec.point); });
    if (!reproduced) {
      std::ostringstream os;
      os << "closed-form equilibrium " << to_string(rec.label) << " at (" << rec.point.transpose()
         << ") is missing from the numerical search for topology " << to_string(topo);
      throw ConsistencyError(os.str());
    }
  }

  const std::size_t n_closed = out.size();
  for (auto rec : numeric) {
    const bool known = std::any_of(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_closed),
                                   [&](const EquilibriumRecord& c) { return near(c.point, rec.point); });
    if (known) continue;
    if (rec.label == EqLabel::Numerical && (rec.point.array() > 0.0).all()) {
      if (!catalog_has_coex) {
        rec.label = EqLabel::Coex;
      } else {
        rec.diagnostics.push_back("interior equilibrium not produced by the closed-form catalog");
      }
    } else if (rec.label == EqLabel::Numerical) {
      rec.diagnostics.push_back("boundary equilibrium not produced by the closed-form catalog");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace metapop
