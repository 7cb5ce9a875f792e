#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "chincl/channel.hpp"

namespace chincl {

inline constexpr double kEqTol = 1e-7;       // residual bound for an accepted witness
inline constexpr double kEigTol = 1e-7;      // eigenvalue multiset comparison
inline constexpr double kGapTol = 1e-6;      // spectrum simplicity detection
inline constexpr double kCapStrictTol = 1e-7;  // strictness margin for capacity drops

/// Capacity of a DMC in bits together with the final input distribution.
/// Alternating maximization with the standard bracket max_i D_i >= C >=
/// sum_i p_i D_i used as the stopping rule; the returned capacity is the
/// bracket's lower end, within tol of the truth on exit.
/// Throws: no_convergence.
std::pair<double, ProbVector> blahut_arimoto_capacity(const Channel& k, int max_iters = 20000,
                                                      double tol = 1e-9);

struct AssumptionReport {
  struct As1 {
    bool holds = false;
    double capacity = 0.0;  // bits
    Vec row_drop_capacities;
  } as1;
  struct As2 {
    bool holds = false;
    std::optional<std::pair<Index, Index>> offending_pair;
  } as2;
  struct As3 {
    bool holds = false;
    std::optional<std::pair<Index, Index>> offending_pair;
  } as3_sufficient;

  bool all() const { return as1.holds && as2.holds && as3_sufficient.holds; }
};

/// Verifies the hypotheses under which the permutation characterization of
/// equivalence is complete: every row removal strictly reduces capacity
/// (as1); no all-zero column and no column proportional to another (as2);
/// no column proportional to an entry-permuted version of another column
/// (as3, a sufficient test only). Throws: no_convergence (propagated).
AssumptionReport check_assumptions(const Channel& k);

struct EquivalenceVerdict {
  bool equivalent = false;
  std::optional<PureChannel> r;  // row permutation
  std::optional<PureChannel> t;  // column permutation
  enum class Method { eigen, exhaustive } method = Method::eigen;
  double residual = std::numeric_limits<double>::infinity();
  std::string reason;
};

/// Decides whether K2 = R K1 T for permutations R, T. Eigen route: compare
/// the spectra of K K^T and K^T K; on simple spectra form the orthogonal
/// similarity Q2 Q1^T (resp. for T), round to the nearest permutation and
/// verify. Degenerate or failed rounding falls back to exhaustive search
/// over row permutations with column matching, pruned by sorted-row
/// fingerprints. Throws: size_limit (exhaustive beyond 8x8).
EquivalenceVerdict decide_equivalence(const Channel& k1, const Channel& k2);

}  // namespace chincl
