#include "metapop/sampling.hpp"

#include <boost/random/sobol.hpp>

namespace metapop {

ParamSampler::ParamSampler(std::uint64_t seed, ParamBox box) : rng_(seed), box_(box) {}

double ParamSampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

ModelParams ParamSampler::next() {
  Vec3 r, k;
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < 3; ++i) r(i) = uniform(box_.r_lo, box_.r_hi);
  for (int i = 0; i < 3; ++i) k(i) = uniform(box_.k_lo, box_.k_hi);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) m(i, j) = uniform(box_.m_lo, box_.m_hi);
    }
  }
  return ModelParams::make(r, k, m);
}

std::vector<Vec3> quasi_random_points(std::size_t count, std::uint64_t seed, const Vec3& lo, const Vec3& hi) {
  boost::random::sobol engine(3);
  // The first Sobol point is the origin; skip it along with earlier seeds' blocks.
  engine.discard(3 * (1 + seed * count));
  const double span = static_cast<double>(engine.max() - engine.min()) + 1.0;
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Vec3 u;
    for (int d = 0; d < 3; ++d) u(d) = (static_cast<double>(engine() - engine.min()) + 0.5) / span;
    pts.push_back(lo + u.cwiseProduct(hi - lo));
  }
  return pts;
}

}  // namespace metapop
