#include "metapop/verify.hpp"

#include "metapop/equilibria.hpp"
#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"
#include "metapop/stability.hpp"
#include "metapop/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace metapop {

namespace {

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "r=(" << p.r().transpose() << ") k=(" << p.k().transpose() << ") m=[";
  for (int i = 0; i < 3; ++i) os << (i ? "; " : "") << p.m().row(i);
  os << "]";
  return os.str();
}

PropertyResult topology_count() {
  PropertyResult res{"topology_count", true, false, ""};
  std::set<TopologyId> seen;
  int admissible = 0;
  for (int bits = 0; bits < 64; ++bits) {
    const ArcSet arcs = ArcSet::from_bits(static_cast<std::uint8_t>(bits));
    if (!arcs.admissible()) continue;
    ++admissible;
    seen.insert(canonical_form(arcs).id);
  }
  const auto table = enumerate_canonical();
  int strongly = 0;
  for (const auto& t : table) strongly += is_strongly_connected(t.representative);
  res.pass = table.size() == 13 && seen.size() == 13 && strongly == 5;
  std::ostringstream os;
  os << table.size() << " classes, " << seen.size() << " reached from " << admissible << " admissible arc sets, "
     << strongly << " strongly connected";
  res.detail = os.str();
  return res;
}

PropertyResult existence_theorem(std::uint64_t seed, int n) {
  PropertyResult res{"existence_theorem", true, false, ""};
  ParamSampler s(seed);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const ModelParams p = s.next();
    try {
      const auto built = coexistence_by_construction(p);
      const auto newton = newton_coexistence(p, p.k());
      const double gap = (built.point - newton.point).cwiseAbs().maxCoeff();
      worst = std::max(worst, gap);
      if (gap > 1e-6 || built.residual > 1e-10 || newton.residual > 1e-10) {
        res.pass = false;
        std::ostringstream os;
        os << "draw " << i << ": construction/Newton gap " << gap << ", residuals " << built.residual << ", "
           << newton.residual << " at " << describe(p);
        res.detail = os.str();
        return res;
      }
    } catch (const Error& e) {
      res.pass = false;
      res.detail = "draw " + std::to_string(i) + ": " + e.what() + " at " + describe(p);
      return res;
    }
  }
  std::ostringstream os;
  os << n << " draws, max construction/Newton gap " << worst;
  res.detail = os.str();
  return res;
}

PropertyResult oracle_equivalence(std::uint64_t seed, int n) {
  PropertyResult res{"oracle_equivalence", true, false, ""};
  ParamSampler s(seed + 1);
  int checked = 0;
  for (int i = 0; i < n; ++i) {
    const ModelParams base = s.next();
    for (TopologyId topo : kAllTopologies) {
      const ModelParams p = apply_topology(base, topo);
      try {
        for (const auto& rec : find_all_equilibria(topo, p)) {
          if (rec.residual > 1e-8) {
            res.pass = false;
            res.detail = std::string(to_string(topo)) + " " + std::string(to_string(rec.label)) + " residual " +
                         std::to_string(rec.residual) + " at " + describe(p);
            return res;
          }
          ++checked;
        }
      } catch (const Error& e) {
        res.pass = false;
        res.detail = std::string(to_string(topo)) + ": " + e.what() + " at " + describe(p);
        return res;
      }
    }
  }
  res.detail = std::to_string(checked) + " equilibria checked across " + std::to_string(13 * n) + " systems";
  return res;
}

PropertyResult classifier_consistency(std::uint64_t seed, int n) {
  PropertyResult res{"classifier_consistency", true, false, ""};
  ParamSampler s(seed + 2);
  int compared = 0;
  for (int i = 0; i < n; ++i) {
    const ModelParams base = s.next();
    for (TopologyId topo : kAllTopologies) {
      const ModelParams p = apply_topology(base, topo);
      for (const auto& eq : find_all_equilibria(topo, p)) {
        const auto rep = classify(topo, eq, p);
        const auto stated = rep.stated_stable();
        if (!stated || rep.min_condition_margin() <= 1e-6) continue;
        if (rep.classification == Classification::Marginal) continue;
        ++compared;
        if (*stated != (rep.classification == Classification::Stable)) {
          res.pass = false;
          res.detail = std::string(to_string(topo)) + " " + std::string(to_string(eq.label)) + ": conditions say " +
                       (*stated ? "stable" : "unstable") + ", eigenvalues say " +
                       std::string(to_string(rep.classification)) + " at " + describe(p);
          return res;
        }
      }
    }
  }
  res.detail = std::to_string(compared) + " equilibria compared";
  return res;
}

PropertyResult conditions17(std::uint64_t seed, int n) {
  PropertyResult res{"conditions17_unsatisfiable", true, false, ""};
  ParamSampler s(seed + 3);
  for (int i = 0; i < n; ++i) {
    const ModelParams p = apply_topology(s.next(), TopologyId::Ex7);
    const double r1 = p.r(0), r3 = p.r(2), m13 = p.m(0, 2), m31 = p.m(2, 0);
    const auto rows = closed_form_conditions(TopologyId::Ex7, EqLabel::Origin, Vec3::Zero(), p);
    const bool all = std::all_of(rows.begin(), rows.end(), [](const ConditionRow& r) { return r.holds; });
    // Third condition forces r3 > m13 and r1 > m31, which contradicts the second.
    const bool third = r1 * r3 > r1 * m13 + r3 * m31;
    const bool chain = !third || (r3 > m13 && r1 > m31 && !(m13 + m31 > r1 + r3));
    if (all || !chain) {
      res.pass = false;
      res.detail = std::string(all ? "all three hold" : "inequality chain broken") + " at " + describe(p);
      return res;
    }
  }
  res.detail = std::to_string(n) + " draws, none satisfies all three";
  return res;
}

PropertyResult origin_never_stable(std::uint64_t seed, int n) {
  PropertyResult res{"origin_never_stable", true, false, ""};
  for (TopologyId topo : kAllTopologies) {
    if (const auto hit = origin_never_stable_scan(topo, n, seed + 4)) {
      res.pass = false;
      res.detail = std::string(to_string(topo)) + ": stable origin at " + describe(*hit);
      return res;
    }
  }
  res.detail = std::to_string(13 * n) + " draws, origin never stable";
  return res;
}

PropertyResult migration_conservation(std::uint64_t seed, int n) {
  PropertyResult res{"migration_conservation", true, false, ""};
  ParamSampler s(seed + 5);
  for (int i = 0; i < n; ++i) {
    const ModelParams drawn = s.next();
    const ModelParams p = ModelParams::unchecked(Vec3::Zero(), drawn.k(), drawn.m());
    const Vec3 x(s.uniform(0.0, 5.0), s.uniform(0.0, 5.0), s.uniform(0.0, 5.0));
    const Vec3 f = rhs(p, x);
    const double scale = 1.0 + p.m().cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff();
    if (std::abs(f.sum()) > 1e-12 * scale) {
      res.pass = false;
      std::ostringstream os;
      os.precision(17);
      os << "witness: r=0, P=(" << x.transpose() << "), sum rhs = " << f.sum() << " with " << describe(p);
      res.detail = os.str();
      return res;
    }
  }
  res.detail = std::to_string(n) + " draws, total migration flux zero";
  return res;
}

PropertyResult jacobian_fd(std::uint64_t seed, int n) {
  PropertyResult res{"jacobian_finite_difference", true, false, ""};
  ParamSampler s(seed + 6);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const ModelParams p = s.next();
    const Vec3 x(s.uniform(0.1, 5.0), s.uniform(0.1, 5.0), s.uniform(0.1, 5.0));
    const Mat3 j = jacobian(p, x);
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6 * std::max(1.0, x(c));
      Vec3 a = x, b = x;
      a(c) += h;
      b(c) -= h;
      fd.col(c) = (rhs(p, a) - rhs(p, b)) / (2.0 * h);
    }
    const double err = (j - fd).cwiseAbs().maxCoeff() / std::max(1.0, j.cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
    if (err > 1e-5) {
      res.pass = false;
      res.detail = "relative error " + std::to_string(err) + " at " + describe(p);
      return res;
    }
  }
  std::ostringstream os;
  os << n << " draws, max relative error " << worst;
  res.detail = os.str();
  return res;
}

PropertyResult sign_test_vs_routh_hurwitz() {
  PropertyResult res{"sign_test_vs_routh_hurwitz", true, false, ""};
  // (l + 1)(l^2 + 1): eigenvalues -1, +i, -i.
  const CharacteristicCoefficients c{-1.0, 1.0, -1.0};
  res.pass = paper_sign_conditions(c).all() && !routh_hurwitz(c);
  res.detail = "{-1, +i, -i}: sign test passes, Routh-Hurwitz rejects";
  return res;
}

PropertyResult full_coex_stable(std::uint64_t seed, int n) {
  PropertyResult res{"full_coexistence_stable", true, true, ""};
  ParamSampler s(seed + 7);
  int stable = 0;
  for (int i = 0; i < n; ++i) {
    const ModelParams p = s.next();
    const auto eq = coexistence_by_construction(p);
    if (classify(TopologyId::Full, eq, p).classification == Classification::Stable) {
      ++stable;
    } else if (res.detail.empty()) {
      res.detail = "not stable at " + describe(p) + "; ";
    }
  }
  res.detail += std::to_string(stable) + "/" + std::to_string(n) + " coexistence equilibria stable";
  return res;
}

}  // namespace

std::vector<PropertyResult> run_verification(std::uint64_t seed, int n) {
  if (n < 1) throw PreconditionError("verify requires n >= 1");
  using Check = std::pair<const char*, std::function<PropertyResult()>>;
  const std::vector<Check> checks = {
      {"topology_count", [] { return topology_count(); }},
      {"existence_theorem", [&] { return existence_theorem(seed, n); }},
      {"oracle_equivalence", [&] { return oracle_equivalence(seed, n); }},
      {"classifier_consistency", [&] { return classifier_consistency(seed, n); }},
      {"conditions17_unsatisfiable", [&] { return conditions17(seed, 500 * n); }},
      {"origin_never_stable", [&] { return origin_never_stable(seed, n); }},
      {"migration_conservation", [&] { return migration_conservation(seed, n); }},
      {"jacobian_finite_difference", [&] { return jacobian_fd(seed, n); }},
      {"sign_test_vs_routh_hurwitz", [] { return sign_test_vs_routh_hurwitz(); }},
      {"full_coexistence_stable", [&] { return full_coex_stable(seed, n); }},
  };
  std::vector<PropertyResult> out;
  for (const auto& [name, run] : checks) {
    try {
      out.push_back(run());
    } catch (const Error& e) {
      out.push_back({name, false, false, std::string("raised: ") + e.what()});
    }
  }
  return out;
}

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.pass || r.informational; });
}

}  // namespace metapop
