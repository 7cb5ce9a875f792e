#include "chincl/order.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

namespace chincl {

MajorizationVerdict majorizes(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) fail(errc::shape_mismatch, "majorization needs equal lengths");
  Vec as = a, bs = b;
  std::sort(as.data(), as.data() + as.size(), std::greater<>());
  std::sort(bs.data(), bs.data() + bs.size(), std::greater<>());
  MajorizationVerdict v;
  double pa = 0.0, pb = 0.0;
  for (Index k = 0; k + 1 < as.size(); ++k) {
    pa += as(k);
    pb += bs(k);
    if (pa < pb - kMajorizationTol && !v.first_violation_k) v.first_violation_k = k + 1;
  }
  v.sum_gap = a.sum() - b.sum();
  v.holds = !v.first_violation_k && std::abs(v.sum_gap) <= kMajorizationTol;
  return v;
}

MajorizationVerdict doubly_stochastic_necessary(const Channel& k1, const Channel& k2) {
  if (!is_doubly_stochastic(k1) || !is_doubly_stochastic(k2))
    fail(errc::not_doubly_stochastic, "flattened majorization screen needs doubly stochastic inputs");
  if (k1.rows() != k2.rows()) fail(errc::shape_mismatch, "channels differ in size");
  Vec w1 = Eigen::Map<const Vec>(k1.matrix().data(), k1.matrix().size());
  Vec w2 = Eigen::Map<const Vec>(k2.matrix().data(), k2.matrix().size());
  return majorizes(w1, w2);
}

namespace {

using Cx = std::complex<double>;

std::vector<Cx> dft(const Vec& v) {
  const Index n = v.size();
  std::vector<Cx> out(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    Cx acc{0.0, 0.0};
    for (Index j = 0; j < n; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n);
      acc += v(j) * Cx{std::cos(ang), std::sin(ang)};
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

Vec idft_real(const std::vector<Cx>& f) {
  const Index n = static_cast<Index>(f.size());
  Vec out(n);
  for (Index j = 0; j < n; ++j) {
    Cx acc{0.0, 0.0};
    for (Index k = 0; k < n; ++k) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n);
      acc += f[static_cast<std::size_t>(k)] * Cx{std::cos(ang), std::sin(ang)};
    }
    out(j) = acc.real() / static_cast<double>(n);
  }
  return out;
}

/// Lawson-Hanson active-set NNLS: argmin ||M x - b||_2 with x >= 0.
Vec nnls(const Eigen::MatrixXd& m, const Vec& b) {
  const Index n = m.cols();
  Vec x = Vec::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vec w = m.transpose() * (b - m * x);
  const double tol = 1e-12 * m.cwiseAbs().maxCoeff();
  for (int guard = 0; guard < 30 * static_cast<int>(n); ++guard) {
    Index best = -1;
    double best_w = tol;
    for (Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    while (true) {
      std::vector<Index> act;
      for (Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)]) act.push_back(j);
      Eigen::MatrixXd sub(m.rows(), static_cast<Index>(act.size()));
      for (std::size_t c = 0; c < act.size(); ++c) sub.col(static_cast<Index>(c)) = m.col(act[c]);
      Vec z = sub.colPivHouseholderQr().solve(b);
      double alpha = 1.0;
      Index drop = -1;
      for (std::size_t c = 0; c < act.size(); ++c)
        if (z(static_cast<Index>(c)) <= 0.0) {
          const double xi = x(act[c]);
          const double a = xi / (xi - z(static_cast<Index>(c)));
          if (a < alpha) {
            alpha = a;
            drop = act[c];
          }
        }
      if (drop < 0) {
        x.setZero();
        for (std::size_t c = 0; c < act.size(); ++c) x(act[c]) = z(static_cast<Index>(c));
        break;
      }
      for (std::size_t c = 0; c < act.size(); ++c)
        x(act[c]) = x(act[c]) + alpha * (z(static_cast<Index>(c)) - x(act[c]));
      x(drop) = 0.0;
      passive[static_cast<std::size_t>(drop)] = false;
    }
    w = m.transpose() * (b - m * x);
  }
  return x;
}

/// Cleans deconvolution output into a ProbVector if it is one up to
/// kMajorizationTol; the caller re-verifies the convolution identity.
std::optional<ProbVector> as_witness(const Vec& raw) {
  Vec x = raw;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) < -kMajorizationTol) return std::nullopt;
    if (x(i) < 0.0) x(i) = 0.0;
  }
  const double sum = x.sum();
  if (std::abs(sum - 1.0) > kMajorizationTol) return std::nullopt;
  return ProbVector::validate(x / sum);
}

}  // namespace

CirculantVerdict circulant_conditions(const Channel& k1, const Channel& k2) {
  if (!is_circulant(k1) || !is_circulant(k2))
    fail(errc::not_circulant, "circulant screen needs circulant inputs");
  if (k1.rows() != k2.rows()) fail(errc::shape_mismatch, "channels differ in size");
  const Index n = k1.rows();
  const ProbVector v1 = ProbVector::validate(k1.row(0));
  const ProbVector v2 = ProbVector::validate(k2.row(0));

  CirculantVerdict verdict;
  verdict.necessary_holds = majorizes(v1.entries(), v2.entries()).holds;

  const auto f1 = dft(v1.entries());
  const auto f2 = dft(v2.entries());
  bool invertible = true;
  for (const auto& c : f1)
    if (std::abs(c) <= 1e-10) {
      invertible = false;
      break;
    }

  std::optional<ProbVector> witness;
  if (invertible) {
    std::vector<Cx> ratio(f1.size());
    for (std::size_t k = 0; k < f1.size(); ++k) ratio[k] = f2[k] / f1[k];
    witness = as_witness(idft_real(ratio));
  } else {
    // circulant system M x = v2 with M[k][j] = v1[(k-j) mod n]
    Eigen::MatrixXd m(n, n);
    for (Index k = 0; k < n; ++k)
      for (Index j = 0; j < n; ++j) m(k, j) = v1[(k - j + n) % n];
    Vec x = nnls(m, v2.entries());
    if ((m * x - v2.entries()).cwiseAbs().maxCoeff() < kMajorizationTol) witness = as_witness(x);
  }

  if (witness) {
    const Vec conv = circ_conv(v1, *witness).entries();
    if ((conv - v2.entries()).cwiseAbs().maxCoeff() <= kMajorizationTol) {
      verdict.sufficient_holds = true;
      verdict.x = std::move(witness);
    }
  }
  return verdict;
}

namespace {

std::vector<std::vector<Index>> all_permutations(Index n) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  std::vector<std::vector<Index>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

CirculantForm symmetric_to_circulant(const Channel& k) {
  if (k.rows() != k.cols() || (k.rows() != 3 && k.rows() != 4))
    fail(errc::unsupported_size, "reduction applies to 3x3 and 4x4 channels");
  if (!is_symmetric_dmc(k)) fail(errc::not_symmetric, "reduction needs a symmetric channel");
  const Index n = k.rows();
  const auto perms = all_permutations(n);
  for (const auto& rp : perms) {
    // row_perm as pure channel: row i of the result is row rp[i] of k
    Mat rowed(n, n);
    for (Index i = 0; i < n; ++i) rowed.row(i) = k.matrix().row(rp[static_cast<std::size_t>(i)]);
    for (const auto& cp : perms) {
      // col_perm maps column c of the input to column cp[c] of the result
      Mat m(n, n);
      for (Index c = 0; c < n; ++c) m.col(cp[static_cast<std::size_t>(c)]) = rowed.col(c);
      Channel cand = Channel::validate(m);
      if (is_circulant(cand))
        return CirculantForm{std::move(cand), PureChannel(n, n, rp), PureChannel(n, n, cp)};
    }
  }
  fail(errc::no_circulant_form, "no permutation pair yields a circulant form");
}

std::pair<bool, bool> bsc_bec_inclusion(double p, double eps) {
  if (p < 0.0 || p > 0.5) fail(errc::out_of_range, "BSC crossover must be in [0, 1/2]");
  if (eps < 0.0 || eps > 1.0) fail(errc::out_of_range, "BEC erasure must be in [0, 1]");
  const bool bsc_in_bec = eps <= 2.0 * p;
  const bool bec_in_bsc = std::abs(p) <= kMajorizationTol;
  return {bsc_in_bec, bec_in_bsc};
}

}  // namespace chincl
