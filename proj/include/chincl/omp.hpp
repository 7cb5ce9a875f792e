#pragma once

#include <utility>
#include <vector>

#include "chincl/atoms.hpp"
#include "chincl/channel.hpp"

namespace chincl {

inline constexpr double kNonNegTol = 1e-10;  // min g >= -kNonNegTol counts as non-negative
inline constexpr double kRankTol = 1e-10;    // relative column-dependence threshold

struct OmpConfig {
  int s = 1;                  // sparsity cap
  double epsilon = 1e-8;      // residue essentially-zero tolerance
  long max_actual_iters = 0;  // backtracking pass cap (0 = 50*s); alg2 only
  bool record_trace = false;  // per-attempt and per-accept instrumentation
};

struct OmpAttempt {
  double inner_product = 0.0;
  double new_coeff = 0.0;
  bool rank_skipped = false;  // candidate collinear with selection, no coefficient
};

struct OmpOutcome {
  bool f = false;
  int s1 = 0;
  std::vector<std::size_t> lambda;  // selected column indices, length s1
  std::vector<double> g;            // weights, length s1
  long t_act = 0;                   // outer-loop passes
  long backtracks = 0;
  double residue_inf = 0.0;
  // populated when record_trace:
  std::vector<OmpAttempt> attempts;
  std::vector<std::pair<double, double>> accepted_l2;  // (|r_{t-1}|_2, |r_t|_2)
};

/// Unconstrained least squares on the given columns plus the gate bit
/// (min g >= -kNonNegTol). Throws: rank_deficient.
std::pair<Vec, bool> nnls_gate(const Eigen::MatrixXd& selected_cols, const Vec& h);

/// Greedy recovery: repeatedly select the column with the largest signed
/// inner product against the residue, marking attempted columns, accepting
/// the step whether or not the least-squares gate passed; succeeds when the
/// final weights are non-negative and the residue is below epsilon.
/// Collinear candidates are marked attempted and skipped.
OmpOutcome run_alg1(const AtomSystem& sys, const OmpConfig& cfg);

/// Backtracking variant: per-depth inner-product rows are cached and a
/// depth whose candidates are exhausted (or whose gate fails for all) is
/// abandoned, deleting the most recent selection. Throws: iteration_limit
/// when the pass count exceeds cfg.max_actual_iters.
OmpOutcome run_alg2(const AtomSystem& sys, const OmpConfig& cfg);

struct IpProbeEntry {
  std::size_t column = 0;
  double inner_product = 0.0;
  double new_coeff = 0.0;
};

struct IpProbeReport {
  bool terminal = false;         // residue already below epsilon
  bool has_positive_ip = false;  // some unselected column has ip > 0
  bool signs_agree = true;       // sign(new_coeff) == sign(ip) at 1e-9 on all entries
  double residue_inf = 0.0;
  std::vector<IpProbeEntry> entries;
};

/// For a partial selection (columns of sys), computes the least-squares
/// residue and reports, per remaining candidate, the signed inner product
/// and the coefficient the candidate would receive. Collinear candidates
/// are omitted. Throws: rank_deficient (partial selection itself
/// dependent), index_out_of_range.
IpProbeReport positive_ip_necessity_probe(const AtomSystem& sys,
                                          const std::vector<std::size_t>& partial,
                                          double epsilon = 1e-8);

struct Conjecture1Result {
  bool found = false;
  Index witness_column = -1;
};

/// Searches for a column of g (non-negative entries, independent columns)
/// whose projection onto the span of the others has non-negative
/// coefficients; reports the first witness. A found=false result is a
/// counterexample worth preserving. Throws: rank_deficient.
Conjecture1Result conjecture1_probe(const Eigen::MatrixXd& g);

}  // namespace chincl
