#pragma once

#include <cstdint>
#include <vector>

#include "chincl/certificate.hpp"
#include "chincl/channel.hpp"

namespace chincl {

/// splitmix64: a small, stable 64-bit generator. Chosen over std engines
/// because its output sequence is pinned by this header alone, so seeded
/// experiments reproduce byte-for-byte on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Per-trial stream: hash(seed, trial) so trials are independent and may be
/// generated in any order by a worker pool.
SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial);

/// Row-stochastic matrix with iid uniform [0,1] entries, rows normalized.
Channel random_channel(Index n, Index m, SplitMix64& rng);
Vec random_prob_vector(Index n, SplitMix64& rng);
PureChannel random_pure(Index rows, Index cols, SplitMix64& rng);
PureChannel random_permutation(Index n, SplitMix64& rng);
/// Convex combination of `terms` random permutation matrices.
Channel random_doubly_stochastic(Index n, int terms, SplitMix64& rng);

/// A planted inclusion instance: K2 = sum_a g_a R_a K1 T_a with dense
/// stochastic processors, so inclusion holds by construction.
struct PlantedInstance {
  Channel k1;
  Channel k2;
  std::vector<Channel> pre;   // R_a, n2 x n1
  std::vector<Channel> post;  // T_a, m1 x m2
  std::vector<double> g;
};

PlantedInstance plant_instance(Index n1, Index m1, Index n2, Index m2, int beta, SplitMix64& rng);

/// Planted instance whose processors are pure pairs, yielding an exact
/// InclusionCertificate (residual 0 up to roundoff) for K2 within K1.
struct PurePlanted {
  Channel k1;
  Channel k2;
  InclusionCertificate cert;
};

PurePlanted plant_pure_certificate(Index n1, Index m1, Index n2, Index m2, int beta, SplitMix64& rng);

/// Doubly stochastic variant: K1 doubly stochastic, processors are
/// permutation pairs, so K2 stays doubly stochastic.
PurePlanted plant_doubly_stochastic(Index n, int beta, SplitMix64& rng);

}  // namespace chincl
