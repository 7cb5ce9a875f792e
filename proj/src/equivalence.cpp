#include "chincl/equivalence.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace chincl {

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

std::pair<double, ProbVector> blahut_arimoto_capacity(const Channel& k, int max_iters, double tol) {
  const Index n = k.rows(), m = k.cols();
  Vec p = Vec::Constant(n, 1.0 / static_cast<double>(n));
  Vec d(n);
  const double tol_nats = tol * kLn2;
  for (int it = 0; it < max_iters; ++it) {
    Vec q = Vec::Zero(m);
    for (Index i = 0; i < n; ++i) q += p(i) * k.row(i);
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index j = 0; j < m; ++j)
        if (k(i, j) > 0.0) acc += k(i, j) * std::log(k(i, j) / q(j));
      d(i) = acc;
    }
    const double upper = d.maxCoeff();
    const double lower = p.dot(d);
    if (upper - lower <= tol_nats) return {lower / kLn2, ProbVector::validate(p)};
    // multiplicative update, stabilized around the current maximum
    Vec w(n);
    for (Index i = 0; i < n; ++i) w(i) = p(i) * std::exp(d(i) - upper);
    p = w / w.sum();
  }
  fail(errc::no_convergence, "capacity bracket wider than tol after max_iters");
}

namespace {

/// Capacity of k with one row removed; zero when only one row remains.
double drop_row_capacity(const Channel& k, Index drop) {
  if (k.rows() == 1) return 0.0;
  Mat sub(k.rows() - 1, k.cols());
  Index r = 0;
  for (Index i = 0; i < k.rows(); ++i)
    if (i != drop) sub.row(r++) = k.matrix().row(i);
  return blahut_arimoto_capacity(Channel::validate(sub)).first;
}

bool proportional(const Vec& u, const Vec& v, double tol) {
  const double su = u.cwiseAbs().sum(), sv = v.cwiseAbs().sum();
  if (su <= tol || sv <= tol) return su <= tol && sv <= tol;
  return ((u / su - v / sv).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace

AssumptionReport check_assumptions(const Channel& k) {
  AssumptionReport rep;
  const auto [cap, dist] = blahut_arimoto_capacity(k);
  rep.as1.capacity = cap;
  rep.as1.row_drop_capacities = Vec(k.rows());
  bool as1 = true;
  for (Index i = 0; i < k.rows(); ++i) {
    const double ci = drop_row_capacity(k, i);
    rep.as1.row_drop_capacities(i) = ci;
    if (ci >= cap - kCapStrictTol) as1 = false;
  }
  rep.as1.holds = as1;

  rep.as2.holds = true;
  const double tol = kEqTol;
  for (Index j = 0; j < k.cols() && rep.as2.holds; ++j) {
    if (k.matrix().col(j).cwiseAbs().sum() <= tol) {
      rep.as2.holds = false;
      rep.as2.offending_pair = {j, j};  // all-zero column reported against itself
    }
  }
  for (Index a = 0; a < k.cols() && rep.as2.holds; ++a)
    for (Index b = a + 1; b < k.cols() && rep.as2.holds; ++b)
      if (proportional(k.matrix().col(a), k.matrix().col(b), tol)) {
        rep.as2.holds = false;
        rep.as2.offending_pair = {a, b};
      }

  rep.as3_sufficient.holds = true;
  for (Index a = 0; a < k.cols() && rep.as3_sufficient.holds; ++a)
    for (Index b = a + 1; b < k.cols() && rep.as3_sufficient.holds; ++b) {
      Vec u = k.matrix().col(a), v = k.matrix().col(b);
      std::sort(u.data(), u.data() + u.size());
      std::sort(v.data(), v.data() + v.size());
      if (proportional(u, v, tol)) {
        rep.as3_sufficient.holds = false;
        rep.as3_sufficient.offending_pair = {a, b};
      }
    }
  return rep;
}

namespace {

/// Descending eigendecomposition of the symmetric PSD matrix s, with each
/// eigenvector's largest-magnitude entry made positive so the basis is
/// reproducible across backends.
std::pair<Vec, Eigen::MatrixXd> canonical_eigs(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Index n = s.rows();
  Vec vals(n);
  Eigen::MatrixXd vecs(n, n);
  for (Index i = 0; i < n; ++i) {
    vals(i) = es.eigenvalues()(n - 1 - i);
    Vec v = es.eigenvectors().col(n - 1 - i);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    vecs.col(i) = v;
  }
  return {vals, vecs};
}

bool spectra_match(const Vec& a, const Vec& b) {
  return (a - b).cwiseAbs().maxCoeff() <= kEigTol;
}

bool spectrum_simple(const Vec& vals) {
  for (Index i = 0; i + 1 < vals.size(); ++i)
    if (vals(i) - vals(i + 1) <= kGapTol) return false;
  return true;
}

/// Rounds a near-permutation matrix by row-wise argmax; empty when the
/// argmaxes collide.
std::optional<PureChannel> round_to_permutation(const Eigen::MatrixXd& m) {
  const Index n = m.rows();
  std::vector<Index> map(static_cast<std::size_t>(n));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    Index arg = 0;
    m.row(i).maxCoeff(&arg);
    if (used[static_cast<std::size_t>(arg)]) return std::nullopt;
    used[static_cast<std::size_t>(arg)] = true;
    map[static_cast<std::size_t>(i)] = arg;
  }
  return PureChannel(n, n, std::move(map));
}

double pair_residual(const Channel& k1, const Channel& k2, const PureChannel& r, const PureChannel& t) {
  return (pure_product(r, k1.matrix(), t) - k2.matrix()).cwiseAbs().maxCoeff();
}

/// Exhaustive witness search: row permutations in lexicographic order with
/// per-row candidate pruning by sorted-row fingerprints, then column
/// matching of r*K1 against K2.
std::optional<std::pair<PureChannel, PureChannel>> exhaustive_search(const Channel& k1, const Channel& k2) {
  const Index n = k1.rows(), m = k1.cols();
  if (n > 8 || m > 8) fail(errc::size_limit, "exhaustive equivalence search capped at 8x8");

  // candidate K1-rows per K2-row by sorted-content comparison
  std::vector<Vec> k1_sorted, k2_sorted;
  for (Index i = 0; i < n; ++i) {
    Vec a = k1.matrix().row(i).transpose(), b = k2.matrix().row(i).transpose();
    std::sort(a.data(), a.data() + m);
    std::sort(b.data(), b.data() + m);
    k1_sorted.push_back(a);
    k2_sorted.push_back(b);
  }
  std::vector<std::vector<Index>> cand(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if ((k2_sorted[static_cast<std::size_t>(i)] - k1_sorted[static_cast<std::size_t>(j)])
              .cwiseAbs()
              .maxCoeff() <= kEqTol)
        cand[static_cast<std::size_t>(i)].push_back(j);

  std::vector<Index> row_map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  // column matching with backtracking over ambiguous (duplicate) columns
  auto match_columns = [&](const Mat& rk) -> std::optional<PureChannel> {
    std::vector<Index> col_of(static_cast<std::size_t>(m), -1);  // result column of input column
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    auto rec = [&](auto&& self, Index c) -> bool {
      if (c == m) return true;
      for (Index j = 0; j < m; ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        if ((rk.col(c) - k2.matrix().col(j)).cwiseAbs().maxCoeff() > kEqTol) continue;
        taken[static_cast<std::size_t>(j)] = true;
        col_of[static_cast<std::size_t>(c)] = j;
        if (self(self, c + 1)) return true;
        taken[static_cast<std::size_t>(j)] = false;
      }
      return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return PureChannel(m, m, col_of);
  };

  auto rec_rows = [&](auto&& self, Index i) -> std::optional<std::pair<PureChannel, PureChannel>> {
    if (i == n) {
      std::vector<Index> rmap(row_map.size());
      for (std::size_t q = 0; q < row_map.size(); ++q) rmap[q] = row_map[q];
      PureChannel r(n, n, rmap);
      Mat rk(n, m);
      for (Index q = 0; q < n; ++q) rk.row(q) = k1.matrix().row(row_map[static_cast<std::size_t>(q)]);
      if (auto t = match_columns(rk)) return std::make_pair(r, *t);
      return std::nullopt;
    }
    for (Index j : cand[static_cast<std::size_t>(i)]) {
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = true;
      row_map[static_cast<std::size_t>(i)] = j;
      if (auto hit = self(self, i + 1)) return hit;
      used[static_cast<std::size_t>(j)] = false;
    }
    return std::nullopt;
  };
  return rec_rows(rec_rows, 0);
}

}  // namespace

EquivalenceVerdict decide_equivalence(const Channel& k1, const Channel& k2) {
  EquivalenceVerdict v;
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
    v.reason = "shape mismatch";
    return v;
  }

  const Eigen::MatrixXd m1 = k1.matrix(), m2 = k2.matrix();
  const auto [l1, q1] = canonical_eigs(m1 * m1.transpose());
  const auto [l2, q2] = canonical_eigs(m2 * m2.transpose());
  if (!spectra_match(l1, l2)) {
    v.reason = "left Gram spectra differ";
    return v;
  }
  const auto [s1, q3] = canonical_eigs(m1.transpose() * m1);
  const auto [s2, q4] = canonical_eigs(m2.transpose() * m2);
  if (!spectra_match(s1, s2)) {
    v.reason = "right Gram spectra differ";
    return v;
  }

  if (spectrum_simple(l1) && spectrum_simple(s1)) {
    auto r = round_to_permutation(q2 * q1.transpose());
    if (r) {
      // the similarity defines t up to transposition; verify both products
      for (const Eigen::MatrixXd& tc : {Eigen::MatrixXd(q3 * q4.transpose()), Eigen::MatrixXd(q4 * q3.transpose())}) {
        auto t = round_to_permutation(tc);
        if (!t) continue;
        const double res = pair_residual(k1, k2, *r, *t);
        if (res <= kEqTol) {
          v.equivalent = true;
          v.r = *r;
          v.t = *t;
          v.method = EquivalenceVerdict::Method::eigen;
          v.residual = res;
          return v;
        }
      }
    }
  }

  v.method = EquivalenceVerdict::Method::exhaustive;
  if (auto hit = exhaustive_search(k1, k2)) {
    const double res = pair_residual(k1, k2, hit->first, hit->second);
    if (res <= kEqTol) {
      v.equivalent = true;
      v.r = hit->first;
      v.t = hit->second;
      v.residual = res;
      return v;
    }
  }
  v.reason = "no permutation pair matches";
  return v;
}

}  // namespace chincl
