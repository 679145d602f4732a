#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"
#include "metapop/topology.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <set>

using namespace metapop;

namespace {

// Independent oracle: digraphs as 3x3 adjacency (a[i][j] = rate into i from j).
using Adj = std::array<std::array<bool, 3>, 3>;

Adj adj_of(int bits) {
  static const int pairs[6][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  Adj a{};
  for (int b = 0; b < 6; ++b)
    if (bits >> b & 1) a[pairs[b][0]][pairs[b][1]] = true;
  return a;
}

int code(const Adj& a) {
  int c = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c = c * 2 + a[i][j];
  return c;
}

int orbit_min(const Adj& a) {
  std::array<int, 3> p = {0, 1, 2};
  int best = 1 << 10;
  do {
    Adj b{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b[p[i]][p[j]] = a[i][j];
    best = std::min(best, code(b));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

bool weakly_connected_no_isolated(const Adj& a) {
  int linked = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) linked += a[i][j] || a[j][i];
  return linked >= 2;
}

bool strongly_connected(const Adj& a) {
  bool reach[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) reach[i][j] = i == j || a[j][i];  // j -> i arc, reach[from][to]
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!reach[i][j]) return false;
  return true;
}

}  // namespace

TEST_CASE("census: 13 classes, matching brute force over the 64 labeled arc sets") {
  const auto t0 = std::chrono::steady_clock::now();
  std::map<int, std::set<TopologyId>> oracle_to_ids;
  std::map<TopologyId, std::set<int>> ids_to_oracle;
  for (int bits = 0; bits < 64; ++bits) {
    const Adj a = adj_of(bits);
    const ArcSet arcs = ArcSet::from_bits(static_cast<std::uint8_t>(bits));
    REQUIRE(arcs.admissible() == weakly_connected_no_isolated(a));
    if (!arcs.admissible()) {
      CHECK_THROWS_AS(canonical_form(arcs), InadmissibleArcsError);
      continue;
    }
    const auto cf = canonical_form(arcs);
    CHECK(arcs.permuted(cf.perm) == representative(cf.id));
    oracle_to_ids[orbit_min(a)].insert(cf.id);
    ids_to_oracle[cf.id].insert(orbit_min(a));
    CHECK(is_strongly_connected(arcs) == strongly_connected(a));
  }
  CHECK(oracle_to_ids.size() == 13);
  CHECK(ids_to_oracle.size() == 13);
  for (const auto& [k, ids] : oracle_to_ids) CHECK(ids.size() == 1);
  for (const auto& [k, orbits] : ids_to_oracle) CHECK(orbits.size() == 1);

  const auto table = enumerate_canonical();
  REQUIRE(table.size() == 13);
  std::set<TopologyId> sc;
  for (const auto& t : table)
    if (is_strongly_connected(t.representative)) sc.insert(t.id);
  CHECK(sc == std::set<TopologyId>{TopologyId::Full, TopologyId::Ex2, TopologyId::Hub0, TopologyId::Ex3,
                                   TopologyId::Ex1});
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
}

TEST_CASE("arc counts per class: 1, 1, 4, 4, 3 classes with 6, 5, 4, 3, 2 arcs") {
  std::map<int, int> by_size;
  for (const auto& t : enumerate_canonical()) ++by_size[t.representative.size()];
  CHECK(by_size == std::map<int, int>{{2, 3}, {3, 4}, {4, 4}, {5, 1}, {6, 1}});
}

TEST_CASE("zeroed rates of the catalog") {
  const std::map<TopologyId, std::vector<std::string_view>> expected = {
      {TopologyId::Full, {}},
      {TopologyId::Ex2, {"m23"}},
      {TopologyId::Hub0, {"m23", "m32"}},
      {TopologyId::Ex3, {"m31", "m12"}},
      {TopologyId::Ex7, {"m21", "m23"}},
      {TopologyId::Ex8, {"m21", "m31"}},
      {TopologyId::Ex1, {"m31", "m12", "m23"}},
      {TopologyId::Ex6, {"m21", "m31", "m23"}},
      {TopologyId::Ex2N, {"m12", "m21", "m32"}},
      {TopologyId::Ex7N, {"m21", "m23", "m12"}},
      {TopologyId::Chain, {"m13", "m31", "m12", "m23"}},
      {TopologyId::Converge, {"m13", "m31", "m12", "m32"}},
      {TopologyId::Diverge, {"m13", "m31", "m21", "m23"}},
  };
  for (const auto& [id, zeros] : expected) {
    auto got = zeroed_rates(id);
    auto want = zeros;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK_MESSAGE(got == want, to_string(id));
    CHECK(representative(id).size() == 6 - static_cast<int>(zeros.size()));
  }
}

TEST_CASE("apply_topology zeroes exactly the absent arcs") {
  ParamSampler s(3);
  const ModelParams p = s.next();
  for (TopologyId id : kAllTopologies) {
    const ModelParams q = apply_topology(p, id);
    CHECK(ArcSet::from_params(q) == representative(id));
    CHECK(q.r() == p.r());
    CHECK(q.k() == p.k());
  }
}

TEST_CASE("permute_params relabels consistently with ArcSet::permuted") {
  ParamSampler s(4);
  const ModelParams p = apply_topology(s.next(), TopologyId::Chain);
  const Permutation perm = {2, 0, 1};
  const ModelParams q = permute_params(p, perm);
  CHECK(ArcSet::from_params(q) == ArcSet::from_params(p).permuted(perm));
  for (int i = 0; i < 3; ++i) {
    CHECK(q.r(perm[i]) == p.r(i));
    for (int j = 0; j < 3; ++j) CHECK(q.m(perm[i], perm[j]) == p.m(i, j));
  }
  // rhs is equivariant under relabeling.
  const Vec3 x(0.4, 1.1, 2.3);
  Vec3 y;
  for (int i = 0; i < 3; ++i) y(perm[i]) = x(i);
  const Vec3 fx = rhs(p, x), fy = rhs(q, y);
  for (int i = 0; i < 3; ++i) CHECK(fy(perm[i]) == doctest::Approx(fx(i)));
}

TEST_CASE("canonical_form of a relabeled chain") {
  // 1 -> 3 -> 2: rates m31 and m23.
  const ArcSet arcs = ArcSet::from_bits(0).with(2, 0, true).with(1, 2, true);
  const auto cf = canonical_form(arcs);
  CHECK(cf.id == TopologyId::Chain);
  CHECK(arcs.permuted(cf.perm) == representative(TopologyId::Chain));
}

TEST_CASE("topology tokens round-trip") {
  for (TopologyId id : kAllTopologies) CHECK(parse_topology(to_string(id)) == id);
  CHECK_FALSE(parse_topology("EX4"));
}
