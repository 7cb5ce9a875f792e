#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "chincl/errors.hpp"

namespace chincl {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Entry/row-sum tolerance accepted on load; rows are renormalized to sum
/// exactly to 1 afterwards so downstream algebra sees clean stochasticity.
inline constexpr double kValidationTol = 1e-9;

/// A discrete memoryless channel: a dense row-stochastic matrix.
/// Immutable after construction; every operation on channels is a pure
/// function, so concurrent use needs no synchronization.
class Channel {
 public:
  /// Checks entries and row sums against kValidationTol, clamps negative
  /// dust to zero and renormalizes each row.
  /// Throws: empty_matrix, negative_entry, row_sum.
  static Channel validate(const Mat& raw);

  Index rows() const { return p_.rows(); }
  Index cols() const { return p_.cols(); }
  const Mat& matrix() const { return p_; }
  double operator()(Index i, Index j) const { return p_(i, j); }
  Vec row(Index i) const { return p_.row(i).transpose(); }

  bool operator==(const Channel& other) const { return p_ == other.p_; }

 private:
  explicit Channel(Mat p) : p_(std::move(p)) {}
  Mat p_;
};

/// A 0/1 row-stochastic matrix stored as the column index of the single 1
/// in each row. Expanded to a dense matrix only when needed.
class PureChannel {
 public:
  PureChannel(Index rows, Index cols, std::vector<Index> map);
  static PureChannel identity(Index n);

  Index rows() const { return static_cast<Index>(map_.size()); }
  Index cols() const { return cols_; }
  Index target(Index row) const { return map_[static_cast<std::size_t>(row)]; }
  const std::vector<Index>& map() const { return map_; }

  Mat dense() const;
  bool is_permutation() const;

  bool operator==(const PureChannel& other) const = default;

 private:
  Index cols_;
  std::vector<Index> map_;
};

/// A probability row vector (non-negative, sums to 1).
class ProbVector {
 public:
  /// Same load discipline as Channel::validate.
  /// Throws: empty_matrix, negative_entry, row_sum.
  static ProbVector validate(const Vec& raw);
  static ProbVector point_mass(Index dim, Index at);

  Index dim() const { return w_.size(); }
  const Vec& entries() const { return w_; }
  double operator[](Index i) const { return w_(i); }

 private:
  explicit ProbVector(Vec w) : w_(std::move(w)) {}
  Vec w_;
};

bool is_doubly_stochastic(const Channel& k);
bool is_circulant(const Channel& k);
bool is_symmetric_dmc(const Channel& k);

/// Product channel R*K*T with shape chain (n2 x n1)(n1 x m1)(m1 x m2).
/// Throws: shape_mismatch.
Channel compose(const Channel& r, const Channel& k, const Channel& t);
Channel compose(const PureChannel& r, const Channel& k, const PureChannel& t);

/// Dense matrix R*K*T without channel re-validation (internal fast path;
/// exact convex algebra on the result is left to the caller).
Mat pure_product(const PureChannel& r, const Mat& k, const PureChannel& t);

/// N-fold Kronecker power K^(x)N. Index convention is the standard block
/// one: for A (x) B, entry ((i1,i2),(j1,j2)) = A(i1,j1)*B(i2,j2) with the
/// first factor owning the most significant digit of the row/column index.
/// Worked 2x2 example: for K = [[a,b],[c,d]], K^(x)2 row 0 is
/// [a*a, a*b, b*a, b*b] over columns (00,01,10,11).
/// Throws: size_overflow.
Channel kron_power(const Channel& k, int order);

/// Kronecker product of pure channels is pure; computed on index maps.
PureChannel kron(const PureChannel& a, const PureChannel& b);

/// Circular convolution (v (*) x)[k] = sum_j v[j] * x[(k-j) mod n].
/// Throws: shape_mismatch.
ProbVector circ_conv(const ProbVector& v, const ProbVector& x);

Channel make_bsc(double p);
Channel make_bec(double eps);
/// Recognizers for the two binary families; return the parameter if the
/// matrix matches the layout within kValidationTol.
std::optional<double> as_bsc(const Channel& k);
std::optional<double> as_bec(const Channel& k);

}  // namespace chincl
