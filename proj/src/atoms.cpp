#include "chincl/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "chincl/rng.hpp"

namespace chincl {

namespace {

constexpr double kDedupTol = 1e-12;
constexpr double kWeightSumTol = 1e-8;
constexpr double kWeightNegTol = 1e-10;

double pow_checked(Index base, Index exp) {
  double acc = 1.0;
  for (Index i = 0; i < exp; ++i) {
    acc *= static_cast<double>(base);
    if (acc > 1e15) return acc;
  }
  return acc;
}

std::vector<std::vector<Index>> permutation_maps(Index n) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  std::vector<std::vector<Index>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

void vec_into(const Mat& m, Eigen::Ref<Vec> dst) {
  // column stacking
  Index k = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) dst(k++) = m(i, j);
}

/// Collapses duplicate columns (exact within kDedupTol) onto the lowest
/// atom index, preserving ascending representative order.
void apply_dedup(AtomSystem& sys) {
  const std::size_t q = sys.column_count();
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& a = sys.a;
  auto lex_less = [&](std::size_t x, std::size_t y) {
    for (Index r = 0; r < a.rows(); ++r) {
      if (a(r, static_cast<Index>(x)) < a(r, static_cast<Index>(y))) return true;
      if (a(r, static_cast<Index>(x)) > a(r, static_cast<Index>(y))) return false;
    }
    return x < y;
  };
  std::sort(order.begin(), order.end(), lex_less);

  std::vector<std::size_t> rep_of(q);
  std::size_t run_begin = 0;
  auto close_run = [&](std::size_t run_end) {
    std::size_t rep = order[run_begin];
    for (std::size_t i = run_begin; i < run_end; ++i) rep = std::min(rep, order[i]);
    for (std::size_t i = run_begin; i < run_end; ++i) rep_of[order[i]] = rep;
    run_begin = run_end;
  };
  for (std::size_t i = 1; i < q; ++i) {
    const std::size_t cur = order[i], prev = order[i - 1];
    if ((a.col(static_cast<Index>(cur)) - a.col(static_cast<Index>(prev))).cwiseAbs().maxCoeff() >
        kDedupTol)
      close_run(i);
  }
  close_run(q);

  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < q; ++i)
    if (rep_of[i] == i) reps.push_back(i);
  std::sort(reps.begin(), reps.end());

  Eigen::MatrixXd compact(a.rows(), static_cast<Index>(reps.size()));
  std::vector<std::uint32_t> col_of(q);
  std::vector<std::size_t> col_atom(reps.size());
  for (std::size_t c = 0; c < reps.size(); ++c) {
    compact.col(static_cast<Index>(c)) = a.col(static_cast<Index>(reps[c]));
    col_atom[c] = reps[c];
  }
  for (std::size_t i = 0; i < q; ++i) {
    const auto it = std::lower_bound(reps.begin(), reps.end(), rep_of[i]);
    col_of[i] = static_cast<std::uint32_t>(it - reps.begin());
  }
  sys.a = std::move(compact);
  sys.dedup_map = std::move(col_of);
  sys.column_atom = std::move(col_atom);
}

}  // namespace

std::vector<PureChannel> enumerate_pure(Index n_from, Index n_to) {
  if (n_from < 1 || n_to < 1) fail(errc::empty_matrix, "pure channel shape must be positive");
  const double count = pow_checked(n_to, n_from);
  if (count > static_cast<double>(kEnumerationCap)) fail(errc::size_limit, "pure enumeration exceeds cap");
  std::vector<PureChannel> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<Index> map(static_cast<std::size_t>(n_from), 0);
  while (true) {
    out.emplace_back(n_from, n_to, map);
    Index pos = n_from - 1;
    while (pos >= 0 && ++map[static_cast<std::size_t>(pos)] == n_to) {
      map[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

namespace {

/// idx-th map {0..rows-1} -> {0..cols-1} in lexicographic order (row 0 is
/// the most significant digit).
std::vector<Index> decode_map(std::size_t idx, Index rows, Index cols) {
  std::vector<Index> map(static_cast<std::size_t>(rows));
  for (Index i = rows - 1; i >= 0; --i) {
    map[static_cast<std::size_t>(i)] = static_cast<Index>(idx % static_cast<std::size_t>(cols));
    idx /= static_cast<std::size_t>(cols);
  }
  return map;
}

/// idx-th permutation of {0..n-1} in lexicographic order (factorial base).
std::vector<Index> decode_permutation(std::size_t idx, Index n) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::vector<std::size_t> fact(static_cast<std::size_t>(n), 1);
  for (Index i = 1; i < n; ++i)
    fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(i);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = n - 1; i >= 0; --i) {
    const std::size_t f = fact[static_cast<std::size_t>(i)];
    const std::size_t d = idx / f;
    idx %= f;
    out.push_back(pool[d]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

}  // namespace

PurePair AtomSystem::atom(std::size_t alpha) const {
  if (alpha >= atom_count) fail(errc::index_out_of_range, "atom index " + std::to_string(alpha));
  const Index n1 = k1.rows(), m1 = k1.cols();
  if (family == Family::permutation) {
    std::size_t nt = 1;
    for (Index i = 2; i <= n2; ++i) nt *= static_cast<std::size_t>(i);
    return PurePair{PureChannel(n2, n1, decode_permutation(alpha / nt, n2)),
                    PureChannel(m1, m2, decode_permutation(alpha % nt, m2))};
  }
  std::size_t nt = 1;
  for (Index i = 0; i < m1; ++i) nt *= static_cast<std::size_t>(m2);
  return PurePair{PureChannel(n2, n1, decode_map(alpha / nt, n2, n1)),
                  PureChannel(m1, m2, decode_map(alpha % nt, m1, m2))};
}

AtomSystem build_system(const Channel& k1, const Channel& k2, bool dedup) {
  const Index n1 = k1.rows(), m1 = k1.cols(), n2 = k2.rows(), m2 = k2.cols();
  const double q = pow_checked(n1, n2) * pow_checked(m2, m1);
  if (q > static_cast<double>(kEnumerationCap)) fail(errc::size_limit, "atom count exceeds cap");

  const auto pres = enumerate_pure(n2, n1);
  const auto posts = enumerate_pure(m1, m2);
  const std::size_t nq = pres.size() * posts.size();
  const Index p = n2 * m2;

  AtomSystem sys{k1, k2, n2, m2, AtomSystem::Family::general, dedup, nq,
                 Eigen::MatrixXd(p, static_cast<Index>(nq)), Vec(p), {}, {}};
  vec_into(k2.matrix(), sys.h);

  std::size_t col = 0;
  for (const auto& r : pres)
    for (const auto& t : posts) vec_into(pure_product(r, k1.matrix(), t), sys.a.col(static_cast<Index>(col++)));

  sys.dedup_map.resize(nq);
  sys.column_atom.resize(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    sys.dedup_map[i] = static_cast<std::uint32_t>(i);
    sys.column_atom[i] = i;
  }
  if (dedup) apply_dedup(sys);
  return sys;
}

AtomSystem restrict_to_permutations(const AtomSystem& sys) {
  if (!is_doubly_stochastic(sys.k1) || !is_doubly_stochastic(sys.k2))
    fail(errc::not_doubly_stochastic, "permutation restriction needs doubly stochastic channels");
  const Index n = sys.k1.rows();
  const auto perms = permutation_maps(n);
  const std::size_t nq = perms.size() * perms.size();
  if (nq > kEnumerationCap) fail(errc::size_limit, "atom count exceeds cap");
  const Index p = n * n;

  AtomSystem out{sys.k1, sys.k2, n, n, AtomSystem::Family::permutation, sys.dedup, nq,
                 Eigen::MatrixXd(p, static_cast<Index>(nq)), Vec(p), {}, {}};
  vec_into(sys.k2.matrix(), out.h);
  std::size_t col = 0;
  for (const auto& rp : perms)
    for (const auto& tp : perms)
      vec_into(pure_product(PureChannel(n, n, rp), sys.k1.matrix(), PureChannel(n, n, tp)),
               out.a.col(static_cast<Index>(col++)));
  out.dedup_map.resize(nq);
  out.column_atom.resize(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    out.dedup_map[i] = static_cast<std::uint32_t>(i);
    out.column_atom[i] = i;
  }
  if (out.dedup) apply_dedup(out);
  return out;
}

Index caratheodory_bound(Index n2, Index m2, bool doubly_stochastic) {
  if (n2 < 1 || m2 < 1) fail(errc::empty_matrix, "bound needs positive dimensions");
  if (doubly_stochastic) {
    if (n2 != m2) fail(errc::shape_mismatch, "doubly stochastic bound needs a square shape");
    return (n2 - 1) * (n2 - 1) + 1;
  }
  return n2 * (m2 - 1) + 1;
}

bool verify_certificate(const AtomSystem& sys, const InclusionCertificate& cert, double tol) {
  if (cert.atom_indices.size() != cert.weights.size())
    fail(errc::shape_mismatch, "certificate index/weight length mismatch");
  Vec acc = Vec::Zero(sys.h.size());
  double wsum = 0.0, wmin = 0.0;
  for (std::size_t i = 0; i < cert.atom_indices.size(); ++i) {
    const std::size_t alpha = cert.atom_indices[i];
    if (alpha >= sys.atom_count) fail(errc::index_out_of_range, "atom index " + std::to_string(alpha));
    acc += cert.weights[i] * sys.a.col(static_cast<Index>(sys.dedup_map[alpha]));
    wsum += cert.weights[i];
    wmin = std::min(wmin, cert.weights[i]);
  }
  const double residual = (acc - sys.h).cwiseAbs().maxCoeff();
  const bool weights_ok = wmin >= -kWeightNegTol && std::abs(wsum - 1.0) <= std::max(kWeightSumTol, tol);
  return weights_ok && residual <= tol;
}

InclusionCertificate make_certificate(const AtomSystem& sys, const std::vector<std::size_t>& columns,
                                      const std::vector<double>& weights) {
  if (columns.size() != weights.size()) fail(errc::shape_mismatch, "column/weight length mismatch");
  InclusionCertificate cert;
  Vec acc = Vec::Zero(sys.h.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] >= sys.column_count()) fail(errc::index_out_of_range, "column " + std::to_string(columns[i]));
    const std::size_t alpha = sys.column_atom[columns[i]];
    cert.atom_indices.push_back(alpha);
    cert.weights.push_back(weights[i]);
    cert.atoms.push_back(sys.atom(alpha));
    acc += weights[i] * sys.a.col(static_cast<Index>(columns[i]));
  }
  cert.residual_inf = cert.atom_indices.empty() ? sys.h.cwiseAbs().maxCoeff()
                                                : (acc - sys.h).cwiseAbs().maxCoeff();
  return cert;
}

AtomSystem shuffle_columns(const AtomSystem& sys, std::uint64_t seed) {
  AtomSystem out = sys;
  const std::size_t q = sys.column_count();
  std::vector<std::size_t> perm(q);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = q - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
  // perm[new_col] = old_col
  for (std::size_t c = 0; c < q; ++c) {
    out.a.col(static_cast<Index>(c)) = sys.a.col(static_cast<Index>(perm[c]));
    out.column_atom[c] = sys.column_atom[perm[c]];
  }
  std::vector<std::uint32_t> inverse(q);
  for (std::size_t c = 0; c < q; ++c) inverse[perm[c]] = static_cast<std::uint32_t>(c);
  for (std::size_t alpha = 0; alpha < sys.atom_count; ++alpha)
    out.dedup_map[alpha] = inverse[sys.dedup_map[alpha]];
  return out;
}

namespace {

constexpr char kCacheMagic[8] = {'C', 'H', 'A', 'T', 'O', 'M', 'S', '1'};

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(errc::parse_error, "truncated atom cache");
  return v;
}

void put_matrix(std::ofstream& os, const Eigen::MatrixXd& m) {
  put<std::int64_t>(os, m.rows());
  put<std::int64_t>(os, m.cols());
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

Eigen::MatrixXd get_matrix(std::ifstream& is) {
  const auto rows = get<std::int64_t>(is);
  const auto cols = get<std::int64_t>(is);
  if (rows < 0 || cols < 0 || rows * cols > static_cast<std::int64_t>(kEnumerationCap) * 32)
    fail(errc::parse_error, "bad matrix header in atom cache");
  Eigen::MatrixXd m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  if (!is) fail(errc::parse_error, "truncated atom cache");
  return m;
}

}  // namespace

void save_cache(const AtomSystem& sys, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::parse_error, "cannot open cache for writing: " + path);
  os.write(kCacheMagic, sizeof(kCacheMagic));
  put<std::int64_t>(os, sys.n2);
  put<std::int64_t>(os, sys.m2);
  put<std::uint8_t>(os, sys.family == AtomSystem::Family::permutation ? 1 : 0);
  put<std::uint8_t>(os, sys.dedup ? 1 : 0);
  put<std::uint64_t>(os, sys.atom_count);
  put_matrix(os, sys.k1.matrix());
  put_matrix(os, sys.k2.matrix());
  put_matrix(os, sys.a);
  put<std::uint64_t>(os, sys.dedup_map.size());
  os.write(reinterpret_cast<const char*>(sys.dedup_map.data()),
           static_cast<std::streamsize>(sizeof(std::uint32_t) * sys.dedup_map.size()));
  put<std::uint64_t>(os, sys.column_atom.size());
  for (std::size_t v : sys.column_atom) put<std::uint64_t>(os, v);
}

AtomSystem load_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::parse_error, "cannot open cache: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
    fail(errc::parse_error, "not an atom cache (bad magic/version)");
  const auto n2 = get<std::int64_t>(is);
  const auto m2 = get<std::int64_t>(is);
  const auto family = get<std::uint8_t>(is);
  const auto dedup = get<std::uint8_t>(is);
  const auto atom_count = get<std::uint64_t>(is);
  Channel k1 = Channel::validate(get_matrix(is));
  Channel k2 = Channel::validate(get_matrix(is));
  AtomSystem sys{std::move(k1),
                 std::move(k2),
                 n2,
                 m2,
                 family ? AtomSystem::Family::permutation : AtomSystem::Family::general,
                 dedup != 0,
                 atom_count,
                 get_matrix(is),
                 Vec(),
                 {},
                 {}};
  sys.h = Vec(sys.n2 * sys.m2);
  vec_into(sys.k2.matrix(), sys.h);
  const auto dm = get<std::uint64_t>(is);
  sys.dedup_map.resize(dm);
  is.read(reinterpret_cast<char*>(sys.dedup_map.data()),
          static_cast<std::streamsize>(sizeof(std::uint32_t) * dm));
  const auto ca = get<std::uint64_t>(is);
  sys.column_atom.resize(ca);
  for (std::size_t i = 0; i < ca; ++i) sys.column_atom[i] = get<std::uint64_t>(is);
  if (!is) fail(errc::parse_error, "truncated atom cache");
  return sys;
}

}  // namespace chincl
