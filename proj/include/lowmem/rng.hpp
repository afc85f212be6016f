#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace lowmem {

using Rng = std::mt19937_64;

/// Purposes for independent substreams derived from one master seed.
enum class Stream : std::uint64_t {
  kInit = 1,
  kLmo = 2,
  kZeta = 3,
  kRound = 4,
  kChain = 5,
  kSketch = 6,
  kOja = 7,
};

/// Deterministic substream for (seed, purpose, index). Distinct triples give
/// statistically independent engines.
inline Rng make_stream(std::uint64_t seed, Stream purpose, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline void fill_normal(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(rng);
}

/// Counter-based standard normal: the same (seed, i, j) always yields the same
/// value, so large random test matrices can be regenerated instead of stored.
double counter_normal(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

}  // namespace lowmem
