#include "metapop/topology.hpp"

#include "metapop/errors.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace metapop {

namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs = {{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
constexpr std::array<std::string_view, 6> kRateNames = {"m12", "m13", "m21", "m23", "m31", "m32"};

constexpr std::array<std::string_view, 13> kNames = {"FULL", "EX2",  "HUB0", "EX3",   "EX7",      "EX8",    "EX1",
                                                     "EX6",  "EX2N", "EX7N", "CHAIN", "CONVERGE", "DIVERGE"};

constexpr std::array<Permutation, 6> kPermutations = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

std::uint8_t bit_of(std::string_view rate) {
  for (std::size_t i = 0; i < kRateNames.size(); ++i) {
    if (kRateNames[i] == rate) return static_cast<std::uint8_t>(1u << i);
  }
  return 0;
}

// Rates removed from the fully connected graph, per topology.
std::vector<std::string_view> removed(TopologyId id) {
  switch (id) {
    case TopologyId::Full: return {};
    case TopologyId::Ex2: return {"m23"};
    case TopologyId::Hub0: return {"m23", "m32"};
    case TopologyId::Ex3: return {"m31", "m12"};
    case TopologyId::Ex7: return {"m21", "m23"};
    case TopologyId::Ex8: return {"m21", "m31"};
    case TopologyId::Ex1: return {"m31", "m12", "m23"};
    case TopologyId::Ex6: return {"m21", "m31", "m23"};
    case TopologyId::Ex2N: return {"m12", "m21", "m32"};
    case TopologyId::Ex7N: return {"m21", "m23", "m12"};
    case TopologyId::Chain: return {"m13", "m31", "m12", "m23"};
    case TopologyId::Converge: return {"m13", "m31", "m12", "m32"};
    case TopologyId::Diverge: return {"m13", "m31", "m21", "m23"};
  }
  throw UnknownTopologyError("unknown topology id");
}

}  // namespace

std::string_view to_string(TopologyId id) {
  const auto idx = static_cast<std::size_t>(id);
  if (idx >= kNames.size()) throw UnknownTopologyError("unknown topology id");
  return kNames[idx];
}

std::optional<TopologyId> parse_topology(std::string_view token) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == token) return kAllTopologies[i];
  }
  return std::nullopt;
}

std::array<int, 2> arc_pair(int bit) { return kPairs.at(static_cast<std::size_t>(bit)); }

int arc_bit(int into, int from) {
  for (int b = 0; b < ArcSet::kPairCount; ++b) {
    if (kPairs[b][0] == into && kPairs[b][1] == from) return b;
  }
  throw DomainError("no arc between a patch and itself");
}

ArcSet ArcSet::from_params(const ModelParams& params) {
  std::uint8_t bits = 0;
  for (int b = 0; b < kPairCount; ++b) {
    if (params.m(kPairs[b][0], kPairs[b][1]) > 0.0) bits |= static_cast<std::uint8_t>(1u << b);
  }
  return ArcSet(bits);
}

int ArcSet::size() const noexcept { return std::popcount(bits_); }

bool ArcSet::has(int into, int from) const { return (bits_ >> arc_bit(into, from)) & 1u; }

ArcSet ArcSet::with(int into, int from, bool present) const {
  const auto mask = static_cast<std::uint8_t>(1u << arc_bit(into, from));
  return ArcSet(present ? (bits_ | mask) : (bits_ & ~mask));
}

ArcSet ArcSet::permuted(const Permutation& perm) const {
  std::uint8_t out = 0;
  for (int b = 0; b < kPairCount; ++b) {
    if ((bits_ >> b) & 1u) out |= static_cast<std::uint8_t>(1u << arc_bit(perm[kPairs[b][0]], perm[kPairs[b][1]]));
  }
  return ArcSet(out);
}

bool ArcSet::admissible() const {
  // Three nodes: weakly connected iff at least two of the three unordered pairs are linked.
  int linked_pairs = 0;
  for (auto [a, b] : {std::array{0, 1}, std::array{0, 2}, std::array{1, 2}}) {
    if (has(a, b) || has(b, a)) ++linked_pairs;
  }
  return linked_pairs >= 2;
}

ArcSet representative(TopologyId id) {
  std::uint8_t bits = 0x3F;
  for (auto rate : removed(id)) bits &= static_cast<std::uint8_t>(~bit_of(rate));
  return ArcSet::from_bits(bits);
}

std::vector<CanonicalTopology> enumerate_canonical() {
  std::vector<CanonicalTopology> out;
  out.reserve(kAllTopologies.size());
  for (auto id : kAllTopologies) out.push_back({id, representative(id)});
  return out;
}

CanonicalForm canonical_form(ArcSet arcs) {
  if (!arcs.admissible()) {
    throw InadmissibleArcsError("arc set " + std::to_string(arcs.bits()) +
                                " leaves a patch isolated or the graph disconnected");
  }
  for (const auto& perm : kPermutations) {
    const ArcSet image = arcs.permuted(perm);
    for (auto id : kAllTopologies) {
      if (representative(id) == image) return {id, perm};
    }
  }
  throw InadmissibleArcsError("arc set " + std::to_string(arcs.bits()) + " matches no catalog topology");
}

ModelParams permute_params(const ModelParams& params, const Permutation& perm) {
  Vec3 r, k;
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    r(perm[i]) = params.r(i);
    k(perm[i]) = params.k(i);
    for (int j = 0; j < 3; ++j) m(perm[i], perm[j]) = params.m(i, j);
  }
  return params.validated() ? ModelParams::make(r, k, m) : ModelParams::unchecked(r, k, m);
}

ModelParams apply_topology(const ModelParams& params, TopologyId id) {
  const ArcSet arcs = representative(id);
  Mat3 m = params.m();
  for (int b = 0; b < ArcSet::kPairCount; ++b) {
    const auto [into, from] = kPairs[b];
    if (!((arcs.bits() >> b) & 1u)) m(into, from) = 0.0;
  }
  return params.validated() ? ModelParams::make(params.r(), params.k(), m)
                            : ModelParams::unchecked(params.r(), params.k(), m);
}

bool is_strongly_connected(ArcSet arcs) {
  // reach[i][j]: j reachable from i.
  std::array<std::array<bool, 3>, 3> reach{};
  for (int i = 0; i < 3; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < 3; ++j) {
      if (i != j && arcs.has(j, i)) reach[i][j] = true;
    }
  }
  for (int via = 0; via < 3; ++via) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) reach[i][j] = reach[i][j] || (reach[i][via] && reach[via][j]);
    }
  }
  for (const auto& row : reach) {
    if (!std::all_of(row.begin(), row.end(), [](bool b) { return b; })) return false;
  }
  return true;
}

std::vector<std::string_view> zeroed_rates(TopologyId id) { return removed(id); }

}  // namespace metapop
