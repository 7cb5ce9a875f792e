#include "chincl/rng.hpp"

#include <numeric>

namespace chincl {

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x > limit);
  return x % bound;
}

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mixer(seed);
  const std::uint64_t base = mixer.next_u64();
  return SplitMix64(base ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
}

Channel random_channel(Index n, Index m, SplitMix64& rng) {
  Mat p(n, m);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < m; ++j) {
      p(i, j) = rng.next_unit();
      sum += p(i, j);
    }
    p.row(i) /= sum;
  }
  return Channel::validate(p);
}

Vec random_prob_vector(Index n, SplitMix64& rng) {
  Vec w(n);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    w(i) = rng.next_unit();
    sum += w(i);
  }
  return w / sum;
}

PureChannel random_pure(Index rows, Index cols, SplitMix64& rng) {
  std::vector<Index> map(static_cast<std::size_t>(rows));
  for (auto& t : map) t = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(cols)));
  return PureChannel(rows, cols, std::move(map));
}

PureChannel random_permutation(Index n, SplitMix64& rng) {
  std::vector<Index> map(static_cast<std::size_t>(n));
  std::iota(map.begin(), map.end(), Index{0});
  for (Index i = n - 1; i > 0; --i)
    std::swap(map[static_cast<std::size_t>(i)],
              map[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
  return PureChannel(n, n, std::move(map));
}

Channel random_doubly_stochastic(Index n, int terms, SplitMix64& rng) {
  Vec w = random_prob_vector(terms, rng);
  Mat acc = Mat::Zero(n, n);
  for (int a = 0; a < terms; ++a) acc += w(a) * random_permutation(n, rng).dense();
  return Channel::validate(acc);
}

PlantedInstance plant_instance(Index n1, Index m1, Index n2, Index m2, int beta, SplitMix64& rng) {
  if (beta < 1) fail(errc::out_of_range, "beta must be >= 1");
  Channel k1 = random_channel(n1, m1, rng);
  Vec g = random_prob_vector(beta, rng);
  std::vector<Channel> pre, post;
  Mat k2 = Mat::Zero(n2, m2);
  for (int a = 0; a < beta; ++a) {
    pre.push_back(random_channel(n2, n1, rng));
    post.push_back(random_channel(m1, m2, rng));
    k2 += g(a) * (pre.back().matrix() * k1.matrix() * post.back().matrix());
  }
  return PlantedInstance{std::move(k1), Channel::validate(k2), std::move(pre), std::move(post),
                         std::vector<double>(g.data(), g.data() + g.size())};
}

PurePlanted plant_pure_certificate(Index n1, Index m1, Index n2, Index m2, int beta, SplitMix64& rng) {
  if (beta < 1) fail(errc::out_of_range, "beta must be >= 1");
  Channel k1 = random_channel(n1, m1, rng);
  Vec g = random_prob_vector(beta, rng);
  InclusionCertificate cert;
  Mat k2 = Mat::Zero(n2, m2);
  for (int a = 0; a < beta; ++a) {
    PurePair pair{random_pure(n2, n1, rng), random_pure(m1, m2, rng)};
    k2 += g(a) * pure_product(pair.pre, k1.matrix(), pair.post);
    cert.atoms.push_back(std::move(pair));
    cert.weights.push_back(g(a));
  }
  PurePlanted out{std::move(k1), Channel::validate(k2), std::move(cert)};
  out.cert.residual_inf = certificate_residual(out.k1, out.k2, out.cert);
  return out;
}

PurePlanted plant_doubly_stochastic(Index n, int beta, SplitMix64& rng) {
  if (beta < 1) fail(errc::out_of_range, "beta must be >= 1");
  Channel k1 = random_doubly_stochastic(n, static_cast<int>(2 * n), rng);
  Vec g = random_prob_vector(beta, rng);
  InclusionCertificate cert;
  Mat k2 = Mat::Zero(n, n);
  for (int a = 0; a < beta; ++a) {
    PurePair pair{random_permutation(n, rng), random_permutation(n, rng)};
    k2 += g(a) * pure_product(pair.pre, k1.matrix(), pair.post);
    cert.atoms.push_back(std::move(pair));
    cert.weights.push_back(g(a));
  }
  PurePlanted out{std::move(k1), Channel::validate(k2), std::move(cert)};
  out.cert.residual_inf = certificate_residual(out.k1, out.k2, out.cert);
  return out;
}

}  // namespace chincl
