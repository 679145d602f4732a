#pragma once

#include "metapop/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace metapop {

/// The 13 admissible three-patch migration topologies, up to patch relabeling.
enum class TopologyId {
  Full,
  Ex2,
  Hub0,
  Ex3,
  Ex7,
  Ex8,
  Ex1,
  Ex6,
  Ex2N,
  Ex7N,
  Chain,
  Converge,
  Diverge,
};

inline constexpr std::array<TopologyId, 13> kAllTopologies = {
    TopologyId::Full, TopologyId::Ex2,  TopologyId::Hub0,  TopologyId::Ex3,      TopologyId::Ex7,
    TopologyId::Ex8,  TopologyId::Ex1,  TopologyId::Ex6,   TopologyId::Ex2N,     TopologyId::Ex7N,
    TopologyId::Chain, TopologyId::Converge, TopologyId::Diverge};

/// Stable string token ("FULL", "EX2", ..., "DIVERGE").
std::string_view to_string(TopologyId id);
std::optional<TopologyId> parse_topology(std::string_view token);

/// Relabeling of patches: perm[i] is the new (0-based) label of old patch i.
using Permutation = std::array<int, 3>;

inline constexpr Permutation kIdentity = {0, 1, 2};

/// Set of directed migration arcs. Bit order follows the rate names
/// m12, m13, m21, m23, m31, m32; the arc for m_ij runs from patch j to patch i.
class ArcSet {
 public:
  static constexpr int kPairCount = 6;

  constexpr ArcSet() = default;
  static constexpr ArcSet from_bits(std::uint8_t bits) { return ArcSet(bits & 0x3F); }
  static ArcSet from_params(const ModelParams& params);

  std::uint8_t bits() const noexcept { return bits_; }
  int size() const noexcept;

  /// Arc j -> i present (rate m_ij > 0), 0-based indices.
  bool has(int into, int from) const;
  ArcSet with(int into, int from, bool present) const;

  ArcSet permuted(const Permutation& perm) const;

  /// No isolated patch and weakly connected.
  bool admissible() const;

  friend constexpr bool operator==(ArcSet a, ArcSet b) { return a.bits_ == b.bits_; }

 private:
  constexpr explicit ArcSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

/// (into, from) of the pair stored at bit position `bit`.
std::array<int, 2> arc_pair(int bit);
int arc_bit(int into, int from);

struct CanonicalTopology {
  TopologyId id;
  ArcSet representative;
};

/// The representative arc set of a topology, in the labeling used by the
/// closed-form catalog (e.g. EX7 has m21 = m23 = 0).
ArcSet representative(TopologyId id);

/// All 13 classes, one representative each, in catalog order.
std::vector<CanonicalTopology> enumerate_canonical();

struct CanonicalForm {
  TopologyId id;
  Permutation perm;  ///< carries the input arcs onto representative(id)
};

/// Throws InadmissibleArcsError for isolated patches or disconnected graphs.
CanonicalForm canonical_form(ArcSet arcs);

/// Relabels r, k and both indices of m.
ModelParams permute_params(const ModelParams& params, const Permutation& perm);

/// Zeroes exactly the rates whose arcs are absent from the topology.
ModelParams apply_topology(const ModelParams& params, TopologyId id);

bool is_strongly_connected(ArcSet arcs);

/// Rate names ("m21", ...) set to zero by the topology.
std::vector<std::string_view> zeroed_rates(TopologyId id);

}  // namespace metapop
