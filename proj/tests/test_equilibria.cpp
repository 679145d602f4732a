#include "metapop/equilibria.hpp"
#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace metapop;
using metapop::testing::make_params;
using metapop::testing::max_diff;
using metapop::testing::symmetric;

namespace {

struct Frozen {
  TopologyId topo;
  ModelParams params;
  std::map<EqLabel, Vec3> points;  // from tests/oracles/equilibria_oracle.py
};

std::vector<Frozen> frozen_cases() {
  return {
      {TopologyId::Ex6,
       make_params(Vec3(1.2, 0.9, 0.8), Vec3(2, 1.5, 3), {{0, 0.3, 0.4}, {0, 0, 0}, {0, 0.2, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::I2, Vec3(2, 0, 0)},
        {EqLabel::I3, Vec3(2.4142135623730950, 0, 1.5)},
        {EqLabel::Coex, Vec3(2.5876138082889082, 0.66666666666666667, 1.7807764064044151)}}},
      {TopologyId::Chain,
       make_params(Vec3(1.5, 1, 0.5), Vec3(1, 2, 2.5), {{0, 0, 0}, {0.5, 0, 0}, {0, 0.3, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::W2, Vec3(0, 0, 2.5)},
        {EqLabel::W3, Vec3(0, 1.4, 3.1637659209004637)},
        {EqLabel::Coex, Vec3(0.66666666666666667, 1.7754843869934452, 3.3056572137616154)}}},
      {TopologyId::Converge,
       make_params(Vec3(2, 1, 1.5), Vec3(1.5, 1, 2), {{0, 0, 0}, {0.5, 0, 0.7}, {0, 0, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::X1, Vec3(0, 1, 0)},
        {EqLabel::Y3, Vec3(0, 1.4983319421247958, 1.0666666666666667)},
        {EqLabel::X2, Vec3(1.125, 1.4013878188659973, 0)},
        {EqLabel::Coex, Vec3(1.125, 1.7486659547960242, 1.0666666666666667)}}},
      {TopologyId::Diverge,
       make_params(Vec3(1, 2, 1.5), Vec3(2, 1, 3), {{0, 0.5, 0}, {0, 0, 0}, {0, 0.6, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::Z2, Vec3(0, 0, 3)},
        {EqLabel::Z1, Vec3(2, 0, 0)},
        {EqLabel::Z3, Vec3(2, 0, 3)},
        {EqLabel::Coex, Vec3(2.2041594578792295, 0.45, 3.1703293088490066)}}},
      {TopologyId::Ex7,
       make_params(Vec3(1, 2, 1.5), Vec3(2, 1, 3), {{0, 0.5, 0.4}, {0, 0, 0}, {0.6, 0.3, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::Q1, Vec3(2, 0, 3)},
        {EqLabel::Coex, Vec3(2.2122723943998854, 0.6, 3.1554140393798673)}}},
      {TopologyId::Ex8,
       make_params(Vec3(1.5, 1, 0.5), Vec3(1, 2, 3), {{0, 0.2, 0.3}, {0, 0, 0.2}, {0, 0.4, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::M2Ex8, Vec3(1, 0, 0)},
        {EqLabel::Coex, Vec3(1.3867291732957774, 1.3361003320516389, 1.7907095791679714)}}},
      {TopologyId::Ex2N,
       make_params(Vec3(0.5, 1, 2), Vec3(2, 1.5, 1), {{0, 0, 0.2}, {0, 0, 0.5}, {0.3, 0, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::XEx2N, Vec3(0, 1.5, 0)},
        {EqLabel::Coex, Vec3(1.3282882051236980, 1.8546997577559437, 0.87714873971472098)}}},
      {TopologyId::Full,
       make_params(Vec3(1.5, 0.5, 2), Vec3(2, 3, 1), {{0, 0.7, 0.2}, {0.4, 0, 1}, {0.9, 0.3, 0}}),
       {{EqLabel::Origin, Vec3(0, 0, 0)},
        {EqLabel::Coex, Vec3(1.6944200552012010, 2.2302116140030257, 1.2663117587933626)}}},
  };
}

}  // namespace

TEST_CASE("find_all_equilibria reproduces the exact algebraic solution sets") {
  for (const auto& c : frozen_cases()) {
    CAPTURE(to_string(c.topo));
    const auto found = find_all_equilibria(c.topo, c.params);
    REQUIRE(found.size() == c.points.size());
    for (const auto& eq : found) {
      CAPTURE(to_string(eq.label));
      const auto it = c.points.find(eq.label);
      REQUIRE(it != c.points.end());
      CHECK(max_diff(eq.point, it->second) < 1e-12);
      CHECK(eq.residual <= 1e-10);
    }
  }
}

TEST_CASE("closed forms match the exact solutions before polishing") {
  for (const auto& c : frozen_cases()) {
    CAPTURE(to_string(c.topo));
    for (const auto& rec : closed_form_equilibria(c.topo, c.params)) {
      if (!rec.feasible) continue;
      CAPTURE(to_string(rec.label));
      CHECK(max_diff(rec.point, c.points.at(rec.label)) < 1e-12);
    }
  }
}

TEST_CASE("coexistence by construction agrees with Newton and the exact solution") {
  const auto full = frozen_cases().back();
  const auto built = coexistence_by_construction(full.params);
  CHECK(built.label == EqLabel::Coex);
  CHECK(max_diff(built.point, full.points.at(EqLabel::Coex)) < 1e-10);
  const auto newton = newton_coexistence(full.params, Vec3::Ones());
  CHECK(max_diff(newton.point, built.point) < 1e-10);

  const auto sym = coexistence_by_construction(symmetric());
  CHECK(max_diff(sym.point, Vec3::Ones()) < 1e-10);
}

TEST_CASE("existence theorem over random fully connected draws") {
  ParamSampler s(21);
  for (int n = 0; n < 200; ++n) {
    const ModelParams p = s.next();
    const auto built = coexistence_by_construction(p);
    const auto newton = newton_coexistence(p, p.k());
    REQUIRE((built.point.array() > 0).all());
    REQUIRE(max_diff(built.point, newton.point) < 1e-6);
    REQUIRE(built.residual <= 1e-10);
  }
}

TEST_CASE("level intersection lies on both level-h parabolae and P3 = h closes the loop") {
  ParamSampler s(22);
  for (int n = 0; n < 50; ++n) {
    const ModelParams p = s.next();
    const auto eq = coexistence_by_construction(p);
    const auto q = level_intersection(p, eq.point(2));
    const Vec3 x(q.p1, q.p2, eq.point(2));
    const Vec3 f = rhs(p, x);
    CHECK(std::abs(f(0)) < 1e-9);
    CHECK(std::abs(f(1)) < 1e-9);
    CHECK(upper_sheet_p3(p, q.p1, q.p2) == doctest::Approx(eq.point(2)).epsilon(1e-9));
  }
}

TEST_CASE("construction preconditions") {
  Mat3 m = symmetric().m();
  m(0, 1) = 0;
  const ModelParams p = ModelParams::make(Vec3::Ones(), Vec3::Ones(), m);
  CHECK_THROWS_AS(coexistence_by_construction(p), PreconditionError);
  CHECK_THROWS_AS(newton_coexistence(symmetric(), Vec3(1, 0, 1)), PreconditionError);
}

TEST_CASE("catalog over random draws: residuals and reproduction by brute force") {
  ParamSampler s(23);
  for (int n = 0; n < 60; ++n) {
    const ModelParams base = s.next();
    for (TopologyId topo : kAllTopologies) {
      const ModelParams p = apply_topology(base, topo);
      const auto all = find_all_equilibria(topo, p);  // throws if a closed form is not reproduced
      for (const auto& rec : closed_form_equilibria(topo, p)) {
        if (rec.feasible) CHECK(rec.residual <= 1e-8);
      }
      std::set<EqLabel> labels;
      for (const auto& eq : all) {
        CHECK(eq.residual <= 1e-10);
        labels.insert(eq.label);
      }
      const auto admitted = admitted_labels(topo);
      for (EqLabel l : labels) {
        CAPTURE(to_string(topo));
        CAPTURE(to_string(l));
        CHECK(std::find(admitted.begin(), admitted.end(), l) != admitted.end());
      }
      if (is_strongly_connected(representative(topo))) {
        CHECK(labels == std::set<EqLabel>{EqLabel::Origin, EqLabel::Coex});
        CHECK(all.size() == 2);
      }
    }
  }
}

TEST_CASE("EX6 feasibility follows ce4 and feas_I3") {
  const auto base = frozen_cases().front().params;
  auto labels = [&](const ModelParams& p) {
    std::set<EqLabel> out;
    for (const auto& eq : find_all_equilibria(TopologyId::Ex6, p)) out.insert(eq.label);
    return out;
  };
  CHECK(labels(base) == std::set<EqLabel>{EqLabel::Origin, EqLabel::I2, EqLabel::I3, EqLabel::Coex});
  CHECK(labels(base.with(ParamId::R2, 0.4)) == std::set<EqLabel>{EqLabel::Origin, EqLabel::I2, EqLabel::I3});
  CHECK(labels(base.with(ParamId::R3, 0.3)) == std::set<EqLabel>{EqLabel::Origin, EqLabel::I2, EqLabel::Coex});
}

TEST_CASE("DIVERGE coexistence uses the inflow from patch 2 in the third component") {
  const auto c = frozen_cases()[3];
  const auto cf = closed_form_equilibria(TopologyId::Diverge, c.params);
  const auto it = std::find_if(cf.begin(), cf.end(), [](const auto& r) { return r.label == EqLabel::Coex; });
  REQUIRE(it != cf.end());
  CHECK(it->residual < 1e-14);
}

TEST_CASE("brute force is deterministic per seed") {
  const auto p = frozen_cases()[2].params;
  const auto a = brute_force_equilibria(p, 16, 5);
  const auto b = brute_force_equilibria(p, 16, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].point == b[i].point);
}

TEST_CASE("label tokens round-trip") {
  for (int i = 0; i <= static_cast<int>(EqLabel::Numerical); ++i) {
    const auto l = static_cast<EqLabel>(i);
    CHECK(parse_label(to_string(l)) == l);
  }
}
