#pragma once

#include "metapop/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace metapop {

/// Box used by the randomized property scans.
struct ParamBox {
  double r_lo = 0.1, r_hi = 5.0;
  double k_lo = 0.1, k_hi = 5.0;
  double m_lo = 0.0, m_hi = 2.0;
};

/// Deterministic stream of random parameter draws for a given seed.
class ParamSampler {
 public:
  explicit ParamSampler(std::uint64_t seed, ParamBox box = {});

  /// Fully connected draw; apply_topology() projects it onto a catalog topology.
  ModelParams next();

  std::mt19937_64& engine() noexcept { return rng_; }
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 rng_;
  ParamBox box_;
};

/// `count` low-discrepancy points in the box [lo, hi]^3, skipping the first
/// `seed * count` points of the sequence so different seeds give disjoint sets.
std::vector<Vec3> quasi_random_points(std::size_t count, std::uint64_t seed, const Vec3& lo, const Vec3& hi);

}  // namespace metapop
