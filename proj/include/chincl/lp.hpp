#pragma once

#include <cstdint>
#include <vector>

#include "chincl/atoms.hpp"
#include "chincl/channel.hpp"

namespace chincl {

inline constexpr double kLpPivotTol = 1e-9;      // simplex pivot/pricing tolerance
inline constexpr double kInclusionTol = 1e-7;    // deficiency value counted as zero

enum class RowType { le, eq };

/// minimize objective . x  subject to  a x (<=|=) b, x >= 0.
struct LpProblem {
  Vec objective;
  Eigen::MatrixXd a;
  Vec b;
  std::vector<RowType> row_types;
};

struct LpSolution {
  double optimum = 0.0;
  Vec x;
  /// Dual values per original row; reduced cost of a column v with cost c
  /// is c - duals.dot(v). Redundant (dropped) rows carry dual 0.
  Vec duals;
  long iterations = 0;
};

/// Two-phase primal simplex on a dense tableau, Bland's entering/leaving
/// rule throughout (anti-cycling), basic artificials pivoted or dropped
/// after phase 1. Throws: infeasible, unbounded, iteration_limit.
LpSolution solve_lp(const LpProblem& lp, double pivot_tol = kLpPivotTol, long max_iters = 50'000);

struct DeficiencyResult {
  double value = 0.0;  // optimal 1'c of the per-row bound formulation
  Vec g_full;          // weights over atom indices (probability vector)
  bool included = false;
  long iterations = 0;
};

struct DeficiencyOptions {
  double inclusion_tol = kInclusionTol;
  /// Column-generation threshold: systems with more columns than this are
  /// solved on an active pool seeded by a greedy pass plus random columns,
  /// with full pricing sweeps between solves.
  std::size_t pool_threshold = 50'000;
  std::size_t pool_random = 2'000;
  std::size_t pool_batch = 1'000;
  std::size_t max_pool_rounds = 200;
  std::uint64_t pool_seed = 1;
};

/// Deficiency of k1 w.r.t. k2 over the enumerated atom polytope:
/// minimize 1'c with -c <= [sum_a g_a pre_a K1 post_a - K2]_(:,j) <= c per
/// column j, sum g = 1 (two inequalities), g >= 0. Zero optimum decides
/// inclusion. Throws: kernel errors.
DeficiencyResult shannon_deficiency(const AtomSystem& sys, const DeficiencyOptions& opts = {});

/// Minimum-l1 weights reproducing h exactly: minimize 1'g with A g = h,
/// g >= 0 (all feasible points have 1'g = 1 over this atom set; the
/// non-negative form makes infeasibility the no-inclusion signal).
/// Returns weights over atom indices. Throws: infeasible.
Vec basis_pursuit(const AtomSystem& sys);

/// Sparse certificate from a dense weight vector over atoms.
InclusionCertificate support_certificate(const AtomSystem& sys, const Vec& g_over_atoms,
                                         double support_tol = 1e-12);

}  // namespace chincl
