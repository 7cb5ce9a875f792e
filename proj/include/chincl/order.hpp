#pragma once

#include <optional>
#include <utility>

#include "chincl/channel.hpp"

namespace chincl {

/// Partial-sum comparison tolerance for majorization checks. Sorting is
/// exact, so only the accumulated sums carry rounding error.
inline constexpr double kMajorizationTol = 1e-8;

struct MajorizationVerdict {
  bool holds = false;
  /// Smallest prefix length (1-based, <= n-1) whose partial-sum inequality
  /// fails; absent when all prefixes pass.
  std::optional<Index> first_violation_k;
  /// sum(a) - sum(b); majorization additionally requires |sum_gap| small.
  double sum_gap = 0.0;
};

/// Does a majorize b? Prefix sums of the decreasingly sorted entries are
/// compared with kMajorizationTol slack; the total sums must agree.
/// Throws: shape_mismatch.
MajorizationVerdict majorizes(const Vec& a, const Vec& b);

/// Flattened-entry majorization between doubly stochastic channels; a
/// failed verdict refutes inclusion of k2 in k1, a passing one is
/// inconclusive. Throws: not_doubly_stochastic, shape_mismatch.
MajorizationVerdict doubly_stochastic_necessary(const Channel& k1, const Channel& k2);

struct CirculantVerdict {
  bool necessary_holds = false;   // first-row majorization
  bool sufficient_holds = false;  // deconvolution kernel found
  /// The kernel x with v1 (*) x = v2 when sufficient_holds; also a witness
  /// of output degradation (K1 times the circulant matrix of x equals K2).
  std::optional<ProbVector> x;
};

/// Inclusion screens for circulant pairs. The kernel is recovered by DFT
/// division when every DFT coefficient of v1 is bounded away from zero,
/// otherwise by non-negative least squares on the circulant system; either
/// way the witness is re-verified against circ_conv before being trusted.
/// Throws: not_circulant.
CirculantVerdict circulant_conditions(const Channel& k1, const Channel& k2);

struct CirculantForm {
  Channel circulant;
  PureChannel row_perm;
  PureChannel col_perm;
};

/// Finds permutations with row_perm * K * col_perm circulant; exhaustive
/// search over both permutation groups, first hit in lexicographic order.
/// Throws: not_symmetric, unsupported_size, no_circulant_form.
CirculantForm symmetric_to_circulant(const Channel& k);

/// Closed-form inclusion between BSC(p), p in [0,1/2], and BEC(eps):
/// returns (BSC in BEC, BEC in BSC). Throws: out_of_range.
std::pair<bool, bool> bsc_bec_inclusion(double p, double eps);

}  // namespace chincl
