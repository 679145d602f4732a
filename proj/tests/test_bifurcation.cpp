#include "metapop/bifurcation.hpp"
#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"
#include "test_support.hpp"

#include <algorithm>

using namespace metapop;
using metapop::testing::make_params;

namespace {

ModelParams ex6_base() {
  return make_params(Vec3(1.2, 0.9, 0.8), Vec3(2, 1.5, 3), {{0, 0.3, 0.4}, {0, 0, 0}, {0, 0.2, 0}});
}

std::vector<Crossing> crossings_of(const std::vector<SweepRecord>& recs) {
  std::vector<Crossing> out;
  for (const auto& r : recs) out.insert(out.end(), r.crossings.begin(), r.crossings.end());
  return out;
}

bool has_pair(const std::vector<Threshold>& ts, ParamId id, double v, EqLabel a, EqLabel b) {
  return std::any_of(ts.begin(), ts.end(), [&](const Threshold& t) {
    return t.param == id && std::abs(t.value - v) < 1e-15 && t.exchange == std::pair{a, b};
  });
}

}  // namespace

TEST_CASE("transcritical thresholds of EX6 and DIVERGE") {
  const auto ex6 = ex6_base().with(ParamId::M13, 0.7);
  const auto ts = transcritical_thresholds(TopologyId::Ex6, ex6);
  CHECK(has_pair(ts, ParamId::R2, 0.5, EqLabel::I2, EqLabel::Coex));
  CHECK(has_pair(ts, ParamId::R2, 0.5, EqLabel::I3, EqLabel::Coex));
  CHECK(has_pair(ts, ParamId::R3, 0.7, EqLabel::I2, EqLabel::I3));

  const auto div = make_params(Vec3(1, 1, 1), Vec3(1, 1, 1), {{0, 1, 0}, {0, 0, 0}, {0, 1, 0}});
  CHECK(has_pair(transcritical_thresholds(TopologyId::Diverge, div), ParamId::R2, 2.0, EqLabel::Z3, EqLabel::Coex));
  CHECK(transcritical_thresholds(TopologyId::Full, div).empty());
}

TEST_CASE("Hopf candidate value") {
  const auto p = make_params(Vec3(1, 1, 1), Vec3(1, 1, 1), {{0, 1, 1}, {0, 0, 1}, {0, 1, 0}});
  const auto h = hopf_candidate(p);
  CHECK(h.r2 == doctest::Approx(3.0));
  // The block is Metzler; with zero trace its determinant is -a^2 - m23 m32 <= 0.
  CHECK(h.validity == HopfValidity::Degenerate);

  const auto big_r3 = p.with(ParamId::R3, 5.0);
  CHECK(hopf_candidate(big_r3).r2 == doctest::Approx(-1.0));
  CHECK(hopf_candidate(big_r3).validity == HopfValidity::Degenerate);
}

TEST_CASE("the EX8 trace-zero point never carries a complex pair") {
  ParamSampler s(41);
  for (int n = 0; n < 20000; ++n) {
    const auto p = apply_topology(s.next(), TopologyId::Ex8);
    const auto h = hopf_candidate(p);
    REQUIRE(h.validity == HopfValidity::Degenerate);
    if (h.r2 <= 0) continue;
    // Second stab_82 row at r2 = r2-double-dagger, in the equivalent block-determinant form.
    const double a = h.r2 - p.m(0, 1) - p.m(2, 1);
    const double d = p.r(2) - p.m(0, 2) - p.m(1, 2);
    REQUIRE(a * d <= p.m(1, 2) * p.m(2, 1) + 1e-12);
  }
}

TEST_CASE("EX6 r2 sweep finds the transcritical point at m12 + m32") {
  const auto recs = sweep(TopologyId::Ex6, ex6_base(), ParamId::R2, 0.1, 1.0, 10);
  REQUIRE(recs.size() == 10);
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].param_value > recs[i - 1].param_value);
  const auto cs = crossings_of(recs);
  REQUIRE_FALSE(cs.empty());
  bool on_i2 = false;
  for (const auto& c : cs) {
    CHECK(c.param_value == doctest::Approx(0.5).epsilon(2e-6));
    CHECK(c.type == CrossingType::RealZero);
    if (c.label == EqLabel::I2) {
      on_i2 = true;
      CHECK(std::abs(c.param_value - 0.5) < 1e-6);
    }
  }
  CHECK(on_i2);
}

TEST_CASE("crossing locations do not depend on the grid") {
  const auto a = crossings_of(sweep(TopologyId::Ex6, ex6_base(), ParamId::R2, 0.1, 1.0, 10));
  const auto b = crossings_of(sweep(TopologyId::Ex6, ex6_base(), ParamId::R2, 0.1, 1.0, 19));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(std::abs(a[i].param_value - b[i].param_value) < 1e-6);
  }
}

TEST_CASE("random EX6 sweeps: crossings at r2-dagger and r3-dagger with coinciding partners") {
  ParamSampler s(42);
  for (int n = 0; n < 10; ++n) {
    const auto p = apply_topology(s.next(), TopologyId::Ex6);
    for (const auto& t : transcritical_thresholds(TopologyId::Ex6, p)) {
      CAPTURE(to_string(t.param));
      const auto cs = crossings_of(sweep(TopologyId::Ex6, p, t.param, 0.5 * t.value, 1.5 * t.value + 0.1, 8));
      const bool near = std::any_of(cs.begin(), cs.end(),
                                    [&](const Crossing& c) { return std::abs(c.param_value - t.value) < 1e-6; });
      CHECK(near);
      for (const auto& c : cs) CHECK(std::abs(c.param_value - t.value) < 1e-6);
    }
    // The pair that actually meets: COEX collapses onto I3 if r3 > m13, onto I2 otherwise.
    const auto ts = transcritical_thresholds(TopologyId::Ex6, p);
    const EqLabel partner = p.r(2) > p.m(0, 2) ? EqLabel::I3 : EqLabel::I2;
    for (const auto& t : ts) {
      if (t.param == ParamId::R3 || t.exchange.first == partner) CHECK(exchange_gap(TopologyId::Ex6, p, t) < 1e-5);
    }
  }
}

TEST_CASE("crossings on other catalog topologies sit on analytic thresholds") {
  ParamSampler s(43);
  for (TopologyId topo : {TopologyId::Chain, TopologyId::Converge, TopologyId::Diverge}) {
    for (int n = 0; n < 5; ++n) {
      const auto p = apply_topology(s.next(), topo);
      const auto ts = transcritical_thresholds(topo, p);
      for (const auto& t : ts) {
        CAPTURE(to_string(topo));
        CAPTURE(to_string(t.param));
        const auto cs = crossings_of(sweep(topo, p, t.param, 0.5 * t.value, 1.5 * t.value + 0.1, 7));
        CHECK_FALSE(cs.empty());
        for (const auto& c : cs) {
          const bool explained = std::any_of(ts.begin(), ts.end(), [&](const Threshold& u) {
            return u.param == t.param && std::abs(u.value - c.param_value) < 1e-6;
          });
          CHECK(explained);
        }
      }
    }
  }
}

TEST_CASE("FULL sweeps of a migration rate show no crossings on COEX") {
  ParamSampler s(44);
  for (int n = 0; n < 5; ++n) {
    const auto p = s.next();
    for (const auto& c : crossings_of(sweep(TopologyId::Full, p, ParamId::M12, 0.0, 2.0, 9))) {
      CHECK(c.label != EqLabel::Coex);
    }
  }
}

TEST_CASE("sweep range validation") {
  const auto p = ex6_base();
  CHECK_THROWS_AS(sweep(TopologyId::Ex6, p, ParamId::R2, 1.0, 0.5, 5), DomainError);
  CHECK_THROWS_AS(sweep(TopologyId::Ex6, p, ParamId::R2, 0.1, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sweep(TopologyId::Ex6, p, ParamId::R2, 0.0, 1.0, 5), DomainError);
  CHECK_THROWS_AS(sweep(TopologyId::Ex6, p, ParamId::M12, -0.1, 1.0, 5), DomainError);
  CHECK_NOTHROW(sweep(TopologyId::Ex6, p, ParamId::M12, 0.0, 1.0, 2));
}
