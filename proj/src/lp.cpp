#include "chincl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chincl/omp.hpp"
#include "chincl/rng.hpp"

namespace chincl {

namespace {

class SimplexTableau {
 public:
  SimplexTableau(const LpProblem& lp, double tol) : tol_(tol), n_(lp.objective.size()) {
    const Index m = lp.b.size();
    if (lp.a.rows() != m || lp.a.cols() != n_ || static_cast<Index>(lp.row_types.size()) != m)
      fail(errc::shape_mismatch, "inconsistent LP dimensions");

    // normalize to b >= 0, then append slack columns for <= rows and
    // artificial columns for = rows and flipped <= rows
    Eigen::MatrixXd a = lp.a;
    Vec b = lp.b;
    flip_.assign(static_cast<std::size_t>(m), false);
    for (Index i = 0; i < m; ++i)
      if (b(i) < 0.0) {
        a.row(i) = -a.row(i);
        b(i) = -b(i);
        flip_[static_cast<std::size_t>(i)] = true;
      }

    n_slack_ = 0;
    for (auto t : lp.row_types)
      if (t == RowType::le) ++n_slack_;
    std::vector<Index> art_rows;
    for (Index i = 0; i < m; ++i)
      if (lp.row_types[static_cast<std::size_t>(i)] == RowType::eq || flip_[static_cast<std::size_t>(i)])
        art_rows.push_back(i);
    n_art_ = static_cast<Index>(art_rows.size());

    cols_ = n_ + n_slack_ + n_art_;
    tab_ = Eigen::MatrixXd::Zero(m, cols_ + 1);
    tab_.block(0, 0, m, n_) = a;
    tab_.col(cols_) = b;

    basis_.assign(static_cast<std::size_t>(m), -1);
    slack_col_of_row_.assign(static_cast<std::size_t>(m), -1);
    Index sc = n_;
    for (Index i = 0; i < m; ++i)
      if (lp.row_types[static_cast<std::size_t>(i)] == RowType::le) {
        tab_(i, sc) = flip_[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        slack_col_of_row_[static_cast<std::size_t>(i)] = sc;
        if (!flip_[static_cast<std::size_t>(i)]) basis_[static_cast<std::size_t>(i)] = sc;
        ++sc;
      }
    Index ac = n_ + n_slack_;
    for (Index r : art_rows) {
      tab_(r, ac) = 1.0;
      basis_[static_cast<std::size_t>(r)] = ac;
      ++ac;
    }
    live_rows_.resize(static_cast<std::size_t>(m));
    std::iota(live_rows_.begin(), live_rows_.end(), Index{0});
  }

  /// Runs both phases; returns iterations used. Throws infeasible,
  /// unbounded, iteration_limit.
  long solve(const Vec& objective, long max_iters) {
    long iters = 0;

    // phase 1: minimize the sum of artificials
    if (n_art_ > 0) {
      Vec c1 = Vec::Zero(cols_);
      for (Index j = n_ + n_slack_; j < cols_; ++j) c1(j) = 1.0;
      reset_cost(c1);
      iters += iterate(cols_, max_iters);
      const double infeas = -cost_(cols_);  // cost row tracks -objective value
      if (infeas > 1e-7 * (1.0 + tab_.col(cols_).cwiseAbs().maxCoeff()))
        fail(errc::infeasible, "phase-1 optimum " + std::to_string(infeas));
      purge_artificials();
    }

    // phase 2 over structural + slack columns only
    Vec c2 = Vec::Zero(cols_);
    c2.head(n_) = objective;
    reset_cost(c2);
    iters += iterate(n_ + n_slack_, max_iters - iters);
    return iters;
  }

  Vec extract_x() const {
    Vec x = Vec::Zero(n_);
    for (std::size_t r = 0; r < basis_.size(); ++r)
      if (basis_[r] >= 0 && basis_[r] < n_) x(basis_[r]) = tab_(static_cast<Index>(r), cols_);
    return x;
  }

  /// Duals for the original rows via B' y = c_B on the original columns.
  Vec extract_duals(const Vec& objective, Index orig_rows) const {
    const Index m = tab_.rows();
    Eigen::MatrixXd bt(m, m);
    Vec cb(m);
    for (Index r = 0; r < m; ++r) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      bt.col(r) = original_column(j);
      cb(r) = j < n_ ? objective(j) : 0.0;
    }
    Vec y_norm = bt.transpose().colPivHouseholderQr().solve(cb);
    Vec y = Vec::Zero(orig_rows);
    for (Index r = 0; r < m; ++r) {
      const Index orig = live_rows_[static_cast<std::size_t>(r)];
      y(orig) = flip_[static_cast<std::size_t>(orig)] ? -y_norm(r) : y_norm(r);
    }
    return y;
  }

 private:
  /// Column j of the normalized initial system (before any pivots).
  Vec original_column(Index j) const {
    const Index m = tab_.rows();
    Vec col = Vec::Zero(m);
    if (j < n_) {
      for (Index r = 0; r < m; ++r) col(r) = initial_struct_(live_rows_[static_cast<std::size_t>(r)], j);
      return col;
    }
    for (Index r = 0; r < m; ++r) {
      const Index orig = live_rows_[static_cast<std::size_t>(r)];
      if (slack_col_of_row_[static_cast<std::size_t>(orig)] == j)
        col(r) = flip_[static_cast<std::size_t>(orig)] ? -1.0 : 1.0;
    }
    return col;  // artificial columns never stay basic past purge
  }

  void reset_cost(const Vec& c) {
    cost_ = Eigen::RowVectorXd::Zero(cols_ + 1);
    cost_.head(cols_) = c.transpose();
    for (Index r = 0; r < tab_.rows(); ++r) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      const double cj = j >= 0 && j < cols_ ? c(j) : 0.0;
      if (cj != 0.0) cost_ -= cj * tab_.row(r);
    }
    current_c_ = c;
  }

  void pivot(Index row, Index col) {
    tab_.row(row) /= tab_(row, col);
    Vec colv = tab_.col(col);
    colv(row) = 0.0;
    tab_.noalias() -= colv * tab_.row(row);
    cost_.noalias() -= cost_(col) * tab_.row(row);
    basis_[static_cast<std::size_t>(row)] = col;
  }

  /// Bland's rule: entering = lowest-index column with negative reduced
  /// cost among columns < allowed_cols; leaving = lowest basic index among
  /// minimum-ratio rows.
  long iterate(Index allowed_cols, long max_iters) {
    long it = 0;
    while (true) {
      Index enter = -1;
      for (Index j = 0; j < allowed_cols; ++j)
        if (cost_(j) < -tol_) {
          enter = j;
          break;
        }
      if (enter < 0) return it;
      if (++it > max_iters) fail(errc::iteration_limit, "simplex iteration cap");

      Index leave = -1;
      double best_ratio = 0.0;
      for (Index r = 0; r < tab_.rows(); ++r) {
        const double arj = tab_(r, enter);
        if (arj <= tol_) continue;
        const double ratio = tab_(r, cols_) / arj;
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]))
        {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) fail(errc::unbounded, "no blocking row for entering column");
      pivot(leave, enter);
    }
  }

  /// After phase 1: pivot basic artificials onto any usable column, drop
  /// redundant rows outright.
  void purge_artificials() {
    for (Index r = 0; r < tab_.rows();) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      if (j < n_ + n_slack_) {
        ++r;
        continue;
      }
      Index piv = -1;
      for (Index c = 0; c < n_ + n_slack_; ++c)
        if (std::abs(tab_(r, c)) > tol_) {
          piv = c;
          break;
        }
      if (piv >= 0) {
        pivot(r, piv);
        ++r;
      } else {
        drop_row(r);
      }
    }
  }

  void drop_row(Index r) {
    const Index m = tab_.rows();
    Eigen::MatrixXd nt(m - 1, tab_.cols());
    nt.topRows(r) = tab_.topRows(r);
    nt.bottomRows(m - 1 - r) = tab_.bottomRows(m - 1 - r);
    tab_ = std::move(nt);
    basis_.erase(basis_.begin() + r);
    live_rows_.erase(live_rows_.begin() + r);
  }

 public:
  void remember_initial(const Eigen::MatrixXd& a_normalized) { initial_struct_ = a_normalized; }

 private:
  double tol_;
  Index n_ = 0, n_slack_ = 0, n_art_ = 0, cols_ = 0;
  Eigen::MatrixXd tab_;
  Eigen::RowVectorXd cost_;
  Vec current_c_;
  std::vector<Index> basis_;
  std::vector<Index> slack_col_of_row_;
  std::vector<Index> live_rows_;
  std::vector<bool> flip_;
  Eigen::MatrixXd initial_struct_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp, double pivot_tol, long max_iters) {
  SimplexTableau tab(lp, pivot_tol);
  // normalized structural block for dual extraction
  Eigen::MatrixXd a_norm = lp.a;
  for (Index i = 0; i < lp.b.size(); ++i)
    if (lp.b(i) < 0.0) a_norm.row(i) = -a_norm.row(i);
  tab.remember_initial(a_norm);

  LpSolution sol;
  sol.iterations = tab.solve(lp.objective, max_iters);
  sol.x = tab.extract_x();
  sol.optimum = lp.objective.dot(sol.x);
  sol.duals = tab.extract_duals(lp.objective, lp.b.size());
  return sol;
}

namespace {

/// Assembles the bound-formulation LP over the given pool of system
/// columns. Variables: [g over pool, c over rows of K2].
LpProblem deficiency_lp(const AtomSystem& sys, const std::vector<std::size_t>& pool) {
  const Index p = sys.h.size();
  const Index n2 = sys.n2;
  const Index q = static_cast<Index>(pool.size());
  const Index rows = 2 * p + 2, cols = q + n2;

  LpProblem lp;
  lp.objective = Vec::Zero(cols);
  lp.objective.tail(n2).setOnes();
  lp.a = Eigen::MatrixXd::Zero(rows, cols);
  lp.b = Vec(rows);
  lp.row_types.assign(static_cast<std::size_t>(rows), RowType::le);

  for (Index ridx = 0; ridx < p; ++ridx) {
    const Index i = ridx % n2;  // vec is column-stacked, row index cycles fastest
    for (Index c = 0; c < q; ++c) {
      const double v = sys.a(ridx, static_cast<Index>(pool[static_cast<std::size_t>(c)]));
      lp.a(2 * ridx, c) = v;
      lp.a(2 * ridx + 1, c) = -v;
    }
    lp.a(2 * ridx, q + i) = -1.0;
    lp.a(2 * ridx + 1, q + i) = -1.0;
    lp.b(2 * ridx) = sys.h(ridx);
    lp.b(2 * ridx + 1) = -sys.h(ridx);
  }
  lp.a.block(2 * p, 0, 1, q).setOnes();
  lp.b(2 * p) = 1.0;
  lp.a.block(2 * p + 1, 0, 1, q).setConstant(-1.0);
  lp.b(2 * p + 1) = -1.0;
  return lp;
}

DeficiencyResult assemble_result(const AtomSystem& sys, const std::vector<std::size_t>& pool,
                                 const LpSolution& sol, double inclusion_tol) {
  DeficiencyResult out;
  out.value = sol.optimum;
  out.included = sol.optimum <= inclusion_tol;
  out.iterations = sol.iterations;
  out.g_full = Vec::Zero(static_cast<Index>(sys.atom_count));
  double sum = 0.0;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const double w = std::max(0.0, sol.x(static_cast<Index>(c)));
    out.g_full(static_cast<Index>(sys.column_atom[pool[c]])) += w;
    sum += w;
  }
  if (sum > 0.0) out.g_full /= sum;
  return out;
}

}  // namespace

DeficiencyResult shannon_deficiency(const AtomSystem& sys, const DeficiencyOptions& opts) {
  const std::size_t q = sys.column_count();

  if (q <= opts.pool_threshold) {
    std::vector<std::size_t> pool(q);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    LpSolution sol = solve_lp(deficiency_lp(sys, pool));
    return assemble_result(sys, pool, sol, opts.inclusion_tol);
  }

  // column generation: active pool seeded by a greedy pass plus random
  // columns, full pricing sweep between restricted solves
  std::vector<char> in_pool(q, 0);
  std::vector<std::size_t> pool;
  auto add = [&](std::size_t c) {
    if (!in_pool[c]) {
      in_pool[c] = 1;
      pool.push_back(c);
    }
  };

  OmpConfig seed_cfg{static_cast<int>(caratheodory_bound(sys.n2, sys.m2, false)), 1e-8, 0, false};
  OmpOutcome seed = run_alg1(sys, seed_cfg);
  for (std::size_t c : seed.lambda) add(c);
  SplitMix64 rng(opts.pool_seed);
  for (std::size_t i = 0; i < opts.pool_random && pool.size() < q; ++i)
    add(rng.next_below(q));
  if (pool.empty()) add(0);

  long total_iters = 0;
  for (std::size_t round = 0; round < opts.max_pool_rounds; ++round) {
    std::sort(pool.begin(), pool.end());
    LpProblem lp = deficiency_lp(sys, pool);
    LpSolution sol = solve_lp(lp);
    total_iters += sol.iterations;

    // price every column: reduced cost of g_c is -(w' a_c + s)
    const Index p = sys.h.size();
    Vec w(p);
    for (Index r = 0; r < p; ++r) w(r) = sol.duals(2 * r) - sol.duals(2 * r + 1);
    const double s = sol.duals(2 * p) - sol.duals(2 * p + 1);
    Vec reduced = -(sys.a.transpose() * w).array() - s;

    std::vector<std::pair<double, std::size_t>> violating;
    for (std::size_t c = 0; c < q; ++c)
      if (!in_pool[c] && reduced(static_cast<Index>(c)) < -kLpPivotTol)
        violating.push_back({reduced(static_cast<Index>(c)), c});
    if (violating.empty()) {
      DeficiencyResult out = assemble_result(sys, pool, sol, opts.inclusion_tol);
      out.iterations = total_iters;
      return out;
    }
    std::sort(violating.begin(), violating.end());
    for (std::size_t i = 0; i < violating.size() && i < opts.pool_batch; ++i) add(violating[i].second);
  }
  fail(errc::iteration_limit, "column generation did not converge");
}

Vec basis_pursuit(const AtomSystem& sys) {
  const std::size_t q = sys.column_count();
  LpProblem lp;
  lp.objective = Vec::Ones(static_cast<Index>(q));
  lp.a = sys.a;
  lp.b = sys.h;
  lp.row_types.assign(static_cast<std::size_t>(sys.h.size()), RowType::eq);
  LpSolution sol = solve_lp(lp);

  Vec g = Vec::Zero(static_cast<Index>(sys.atom_count));
  for (std::size_t c = 0; c < q; ++c)
    g(static_cast<Index>(sys.column_atom[c])) += std::max(0.0, sol.x(static_cast<Index>(c)));
  return g;
}

InclusionCertificate support_certificate(const AtomSystem& sys, const Vec& g_over_atoms,
                                         double support_tol) {
  std::vector<std::size_t> cols;
  std::vector<double> weights;
  for (Index alpha = 0; alpha < g_over_atoms.size(); ++alpha)
    if (g_over_atoms(alpha) > support_tol) {
      cols.push_back(sys.dedup_map[static_cast<std::size_t>(alpha)]);
      weights.push_back(g_over_atoms(alpha));
    }
  return make_certificate(sys, cols, weights);
}

}  // namespace chincl
