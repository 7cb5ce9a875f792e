#include "chincl/channel.hpp"

#include <cmath>
#include <numeric>

namespace chincl {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::negative_entry: return "NegativeEntry";
    case errc::row_sum: return "RowSumError";
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::size_overflow: return "SizeOverflow";
    case errc::size_limit: return "SizeLimit";
    case errc::not_doubly_stochastic: return "NotDoublyStochastic";
    case errc::not_circulant: return "NotCirculant";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::unsupported_size: return "UnsupportedSize";
    case errc::no_circulant_form: return "NoCirculantForm";
    case errc::out_of_range: return "OutOfRange";
    case errc::no_convergence: return "NoConvergence";
    case errc::infeasible: return "Infeasible";
    case errc::unbounded: return "Unbounded";
    case errc::iteration_limit: return "IterationLimit";
    case errc::rank_deficient: return "RankDeficient";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Channel Channel::validate(const Mat& raw) {
  if (raw.rows() < 1 || raw.cols() < 1) fail(errc::empty_matrix, "channel must be at least 1x1");
  if (!raw.allFinite()) fail(errc::negative_entry, "non-finite entry");
  Mat p = raw;
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) < -kValidationTol)
        fail(errc::negative_entry, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                       ") = " + std::to_string(p(i, j)));
      if (p(i, j) < 0.0) p(i, j) = 0.0;
    }
    const double sum = p.row(i).sum();
    if (std::abs(sum - 1.0) > kValidationTol)
      fail(errc::row_sum, "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    p.row(i) /= sum;
  }
  return Channel(std::move(p));
}

PureChannel::PureChannel(Index rows, Index cols, std::vector<Index> map) : cols_(cols), map_(std::move(map)) {
  if (rows < 1 || cols < 1) fail(errc::empty_matrix, "pure channel must be at least 1x1");
  if (static_cast<Index>(map_.size()) != rows) fail(errc::shape_mismatch, "index map length != rows");
  for (Index t : map_)
    if (t < 0 || t >= cols) fail(errc::index_out_of_range, "pure map target out of range");
}

PureChannel PureChannel::identity(Index n) {
  std::vector<Index> map(static_cast<std::size_t>(n));
  std::iota(map.begin(), map.end(), Index{0});
  return PureChannel(n, n, std::move(map));
}

Mat PureChannel::dense() const {
  Mat m = Mat::Zero(rows(), cols_);
  for (Index i = 0; i < rows(); ++i) m(i, map_[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

bool PureChannel::is_permutation() const {
  if (rows() != cols_) return false;
  std::vector<bool> hit(static_cast<std::size_t>(cols_), false);
  for (Index t : map_) {
    if (hit[static_cast<std::size_t>(t)]) return false;
    hit[static_cast<std::size_t>(t)] = true;
  }
  return true;
}

ProbVector ProbVector::validate(const Vec& raw) {
  if (raw.size() < 1) fail(errc::empty_matrix, "probability vector must be non-empty");
  Vec w = raw;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) < -kValidationTol) fail(errc::negative_entry, "entry " + std::to_string(i));
    if (w(i) < 0.0) w(i) = 0.0;
  }
  const double sum = w.sum();
  if (std::abs(sum - 1.0) > kValidationTol) fail(errc::row_sum, "sums to " + std::to_string(sum));
  w /= sum;
  return ProbVector(std::move(w));
}

ProbVector ProbVector::point_mass(Index dim, Index at) {
  Vec w = Vec::Zero(dim);
  w(at) = 1.0;
  return ProbVector(std::move(w));
}

bool is_doubly_stochastic(const Channel& k) {
  if (k.rows() != k.cols()) return false;
  for (Index j = 0; j < k.cols(); ++j)
    if (std::abs(k.matrix().col(j).sum() - 1.0) > kValidationTol) return false;
  return true;
}

bool is_circulant(const Channel& k) {
  const Index n = k.rows();
  if (n != k.cols()) return false;
  for (Index i = 1; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(k(i, j) - k(0, (j - i + n) % n)) > kValidationTol) return false;
  return true;
}

namespace {

bool same_multiset(Vec a, Vec b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return ((a - b).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace

bool is_symmetric_dmc(const Channel& k) {
  const Vec row0 = k.matrix().row(0).transpose();
  for (Index i = 1; i < k.rows(); ++i)
    if (!same_multiset(row0, k.matrix().row(i).transpose(), kValidationTol)) return false;
  const Vec col0 = k.matrix().col(0);
  for (Index j = 1; j < k.cols(); ++j)
    if (!same_multiset(col0, k.matrix().col(j), kValidationTol)) return false;
  return true;
}

Channel compose(const Channel& r, const Channel& k, const Channel& t) {
  if (r.cols() != k.rows() || k.cols() != t.rows())
    fail(errc::shape_mismatch, "compose chain requires (n2 x n1)(n1 x m1)(m1 x m2)");
  Mat prod = r.matrix() * k.matrix() * t.matrix();
  return Channel::validate(prod);
}

Mat pure_product(const PureChannel& r, const Mat& k, const PureChannel& t) {
  if (r.cols() != k.rows() || k.cols() != t.rows())
    fail(errc::shape_mismatch, "compose chain requires (n2 x n1)(n1 x m1)(m1 x m2)");
  Mat out = Mat::Zero(r.rows(), t.cols());
  for (Index i = 0; i < r.rows(); ++i) {
    const Index src = r.target(i);
    for (Index c = 0; c < k.cols(); ++c) out(i, t.target(c)) += k(src, c);
  }
  return out;
}

Channel compose(const PureChannel& r, const Channel& k, const PureChannel& t) {
  return Channel::validate(pure_product(r, k.matrix(), t));
}

namespace {

constexpr Index kMaxKronRows = 1 << 13;
constexpr Index kMaxKronEntries = 1 << 24;

}  // namespace

Channel kron_power(const Channel& k, int order) {
  if (order < 1) fail(errc::out_of_range, "Kronecker order must be >= 1");
  // overflow guard on n^N, m^N
  double rows = 1.0, cols = 1.0;
  for (int i = 0; i < order; ++i) {
    rows *= static_cast<double>(k.rows());
    cols *= static_cast<double>(k.cols());
    if (rows > static_cast<double>(kMaxKronRows) || cols > static_cast<double>(kMaxKronRows) ||
        rows * cols > static_cast<double>(kMaxKronEntries))
      fail(errc::size_overflow, "Kronecker power exceeds allocation cap");
  }
  Mat acc = k.matrix();
  for (int i = 1; i < order; ++i) {
    Mat next(acc.rows() * k.rows(), acc.cols() * k.cols());
    for (Index a = 0; a < acc.rows(); ++a)
      for (Index b = 0; b < acc.cols(); ++b)
        next.block(a * k.rows(), b * k.cols(), k.rows(), k.cols()) = acc(a, b) * k.matrix();
    acc = std::move(next);
  }
  return Channel::validate(acc);
}

PureChannel kron(const PureChannel& a, const PureChannel& b) {
  if (a.rows() * b.rows() > kMaxKronRows || a.cols() * b.cols() > kMaxKronRows)
    fail(errc::size_overflow, "pure Kronecker product exceeds allocation cap");
  std::vector<Index> map(static_cast<std::size_t>(a.rows() * b.rows()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j)
      map[static_cast<std::size_t>(i * b.rows() + j)] = a.target(i) * b.cols() + b.target(j);
  return PureChannel(a.rows() * b.rows(), a.cols() * b.cols(), std::move(map));
}

ProbVector circ_conv(const ProbVector& v, const ProbVector& x) {
  const Index n = v.dim();
  if (n != x.dim()) fail(errc::shape_mismatch, "circular convolution needs equal lengths");
  Vec out = Vec::Zero(n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) out(k) += v[j] * x[(k - j + n) % n];
  return ProbVector::validate(out);
}

Channel make_bsc(double p) {
  if (p < 0.0 || p > 1.0) fail(errc::out_of_range, "BSC crossover must be in [0,1]");
  Mat m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return Channel::validate(m);
}

Channel make_bec(double eps) {
  if (eps < 0.0 || eps > 1.0) fail(errc::out_of_range, "BEC erasure must be in [0,1]");
  Mat m(2, 3);
  m << 1.0 - eps, eps, 0.0, 0.0, eps, 1.0 - eps;
  return Channel::validate(m);
}

std::optional<double> as_bsc(const Channel& k) {
  if (k.rows() != 2 || k.cols() != 2) return std::nullopt;
  const double p = k(0, 1);
  if (std::abs(k(1, 0) - p) > kValidationTol) return std::nullopt;
  return p;
}

std::optional<double> as_bec(const Channel& k) {
  if (k.rows() != 2 || k.cols() != 3) return std::nullopt;
  const double eps = k(0, 1);
  if (std::abs(k(1, 1) - eps) > kValidationTol) return std::nullopt;
  if (k(0, 2) > kValidationTol || k(1, 0) > kValidationTol) return std::nullopt;
  return eps;
}

}  // namespace chincl
