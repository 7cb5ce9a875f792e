#include "chincl/omp.hpp"

#include <cmath>

namespace chincl {

namespace {

/// Thin QR of the selected columns, grown one column at a time. The factor
/// for the accepted prefix stays valid across backtracks; trial columns
/// overwrite the suffix slot until one is accepted.
class GrowingQr {
 public:
  GrowingQr(Index p, Index s) : q_(p, s), r_(Eigen::MatrixXd::Zero(s, s)), qth_(s) {}

  /// Attempts to extend the depth-(t-1) factor with column a; returns false
  /// when a is numerically dependent on the committed prefix.
  bool trial_append(Index t, const Vec& a, const Vec& h) {
    const Index k = t - 1;  // zero-based slot
    Vec w = q_.leftCols(k).transpose() * a;
    Vec v = a - q_.leftCols(k) * w;
    const double rho = v.norm();
    if (rho <= kRankTol * std::max(1.0, a.norm())) return false;
    q_.col(k) = v / rho;
    r_.col(k).head(k) = w;
    r_(k, k) = rho;
    qth_(k) = q_.col(k).dot(h);
    return true;
  }

  /// Back-substitution solve of R g = Q'h over the first t columns.
  Vec solve(Index t) const {
    Vec g(t);
    for (Index i = t - 1; i >= 0; --i) {
      double acc = qth_(i);
      for (Index j = i + 1; j < t; ++j) acc -= r_(i, j) * g(j);
      g(i) = acc / r_(i, i);
    }
    return g;
  }

 private:
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  Vec qth_;
};

bool gate_passes(const Vec& g) { return g.size() == 0 || g.minCoeff() >= -kNonNegTol; }

/// First index of the strictly largest entry (lowest index wins ties).
template <typename Row>
Index argmax_first(const Row& v) {
  Index best = 0;
  for (Index j = 1; j < v.size(); ++j)
    if (v(j) > v(best)) best = j;
  return best;
}

}  // namespace

std::pair<Vec, bool> nnls_gate(const Eigen::MatrixXd& selected_cols, const Vec& h) {
  const Index t = selected_cols.cols();
  GrowingQr qr(selected_cols.rows(), t);
  for (Index i = 0; i < t; ++i)
    if (!qr.trial_append(i + 1, selected_cols.col(i), h))
      fail(errc::rank_deficient, "selected column " + std::to_string(i) + " is dependent");
  Vec g = qr.solve(t);
  return {g, gate_passes(g)};
}

OmpOutcome run_alg1(const AtomSystem& sys, const OmpConfig& cfg) {
  if (cfg.s < 1 || cfg.epsilon <= 0.0) fail(errc::out_of_range, "bad OMP config");
  const Index p = sys.h.size();
  const Index s = cfg.s;
  const Vec& h = sys.h;

  OmpOutcome out;
  Vec res = h;
  Eigen::MatrixXd a_sel = Eigen::MatrixXd::Zero(p, s);
  std::vector<std::size_t> lambda(static_cast<std::size_t>(s), 0);
  GrowingQr qr(p, s);
  Vec g;  // empty until the first iteration concludes

  Index t = 1;
  while (t <= s && res.cwiseAbs().maxCoeff() >= cfg.epsilon) {
    Eigen::RowVectorXd ip = res.transpose() * sys.a;
    g = Vec::Constant(t, -1.0);
    bool any_selected = false;
    while (!gate_passes(g) && ip.maxCoeff() > 0.0) {
      const Index lam = argmax_first(ip);
      const double ip_val = ip(lam);
      ip(lam) = -1.0;  // attempted
      const Vec cand = sys.a.col(lam);
      if (!qr.trial_append(t, cand, h)) {
        if (cfg.record_trace) out.attempts.push_back({ip_val, 0.0, true});
        continue;  // collinear candidate: skipped, not selected
      }
      any_selected = true;
      lambda[static_cast<std::size_t>(t - 1)] = static_cast<std::size_t>(lam);
      a_sel.col(t - 1) = cand;
      g = qr.solve(t);
      if (cfg.record_trace) out.attempts.push_back({ip_val, g(t - 1), false});
    }
    if (!any_selected) {
      // no usable positive inner product: the slot stayed empty, deeper
      // least squares would be singular and the verdict is already failure
      ++out.t_act;
      break;
    }
    const Vec next = h - a_sel.leftCols(t) * g;
    if (cfg.record_trace && gate_passes(g)) out.accepted_l2.push_back({res.norm(), next.norm()});
    res = next;
    ++t;
    ++out.t_act;
  }

  out.residue_inf = res.cwiseAbs().maxCoeff();
  const bool nonneg = g.size() == static_cast<Index>(t - 1) && gate_passes(g);
  out.f = nonneg && out.residue_inf < cfg.epsilon;
  out.s1 = static_cast<int>(t - 1);
  out.lambda.assign(lambda.begin(), lambda.begin() + (t - 1));
  out.g.assign(g.data(), g.data() + g.size());
  return out;
}

OmpOutcome run_alg2(const AtomSystem& sys, const OmpConfig& cfg) {
  if (cfg.s < 1 || cfg.epsilon <= 0.0) fail(errc::out_of_range, "bad OMP config");
  const Index p = sys.h.size();
  const Index q = static_cast<Index>(sys.column_count());
  const Index s = cfg.s;
  const long max_act = cfg.max_actual_iters > 0 ? cfg.max_actual_iters : 50L * static_cast<long>(s);
  const Vec& h = sys.h;

  OmpOutcome out;
  std::vector<Vec> res(static_cast<std::size_t>(s) + 1);
  res[0] = h;
  std::vector<Vec> g_at(static_cast<std::size_t>(s) + 1);
  Eigen::MatrixXd a_sel = Eigen::MatrixXd::Zero(p, s);
  std::vector<std::size_t> lambda(static_cast<std::size_t>(s), 0);
  Eigen::MatrixXd ip = Eigen::MatrixXd::Zero(s, q);
  GrowingQr qr(p, s);

  Index t = 1;
  while (1 <= t && t <= s && res[static_cast<std::size_t>(t - 1)].cwiseAbs().maxCoeff() >= cfg.epsilon) {
    auto row = ip.row(t - 1);
    if (row.maxCoeff() <= 0.0 && row.minCoeff() < 0.0) {
      // depth exhausted: reset its cache and trace back
      row.setZero();
      --t;
      ++out.backtracks;
    } else {
      if ((row.array() == 0.0).all())
        row = res[static_cast<std::size_t>(t - 1)].transpose() * sys.a;
      Vec g = Vec::Constant(t, -1.0);
      while (!gate_passes(g) && row.maxCoeff() > 0.0) {
        const Index lam = argmax_first(row);
        const double ip_val = row(lam);
        row(lam) = -1.0;
        const Vec cand = sys.a.col(lam);
        if (!qr.trial_append(t, cand, h)) {
          if (cfg.record_trace) out.attempts.push_back({ip_val, 0.0, true});
          continue;
        }
        lambda[static_cast<std::size_t>(t - 1)] = static_cast<std::size_t>(lam);
        a_sel.col(t - 1) = cand;
        g = qr.solve(t);
        if (cfg.record_trace) out.attempts.push_back({ip_val, g(t - 1), false});
      }
      if (!gate_passes(g)) {
        row.setZero();
        --t;
        ++out.backtracks;
      } else {
        const Vec next = h - a_sel.leftCols(t) * g;
        if (cfg.record_trace)
          out.accepted_l2.push_back({res[static_cast<std::size_t>(t - 1)].norm(), next.norm()});
        res[static_cast<std::size_t>(t)] = next;
        g_at[static_cast<std::size_t>(t)] = g;
        ++t;
      }
    }
    ++out.t_act;
    if (out.t_act > max_act)
      fail(errc::iteration_limit, "pass count exceeded " + std::to_string(max_act));
  }

  out.residue_inf = t >= 1 ? res[static_cast<std::size_t>(t - 1)].cwiseAbs().maxCoeff()
                           : res[0].cwiseAbs().maxCoeff();
  out.f = t >= 1 && res[static_cast<std::size_t>(t - 1)].cwiseAbs().maxCoeff() < cfg.epsilon;
  if (out.f) {
    out.s1 = static_cast<int>(t - 1);
    out.lambda.assign(lambda.begin(), lambda.begin() + (t - 1));
    const Vec& gg = g_at[static_cast<std::size_t>(t - 1)];
    out.g.assign(gg.data(), gg.data() + gg.size());
  }
  return out;
}

IpProbeReport positive_ip_necessity_probe(const AtomSystem& sys,
                                          const std::vector<std::size_t>& partial, double epsilon) {
  const Index p = sys.h.size();
  Eigen::MatrixXd sel(p, static_cast<Index>(partial.size()));
  for (std::size_t i = 0; i < partial.size(); ++i) {
    if (partial[i] >= sys.column_count())
      fail(errc::index_out_of_range, "column " + std::to_string(partial[i]));
    sel.col(static_cast<Index>(i)) = sys.a.col(static_cast<Index>(partial[i]));
  }

  Vec res = sys.h;
  GrowingQr qr(p, static_cast<Index>(partial.size()) + 1);
  for (std::size_t i = 0; i < partial.size(); ++i) {
    if (!qr.trial_append(static_cast<Index>(i) + 1, sel.col(static_cast<Index>(i)), sys.h))
      fail(errc::rank_deficient, "partial selection is dependent");
  }
  if (!partial.empty())
    res = sys.h - sel * qr.solve(static_cast<Index>(partial.size()));

  IpProbeReport rep;
  rep.residue_inf = res.cwiseAbs().maxCoeff();
  if (rep.residue_inf < epsilon) {
    rep.terminal = true;
    return rep;
  }

  const Index t = static_cast<Index>(partial.size()) + 1;
  for (std::size_t c = 0; c < sys.column_count(); ++c) {
    if (std::find(partial.begin(), partial.end(), c) != partial.end()) continue;
    GrowingQr probe_qr = qr;
    const Vec cand = sys.a.col(static_cast<Index>(c));
    if (!probe_qr.trial_append(t, cand, sys.h)) continue;  // collinear candidate, no coefficient
    const double ipv = res.dot(cand);
    const double coeff = probe_qr.solve(t)(t - 1);
    if (ipv > 0.0) rep.has_positive_ip = true;
    const double tol = 1e-9;
    if ((ipv > tol && coeff < -tol) || (ipv < -tol && coeff > tol)) rep.signs_agree = false;
    rep.entries.push_back({c, ipv, coeff});
  }
  return rep;
}

Conjecture1Result conjecture1_probe(const Eigen::MatrixXd& g) {
  const Index m = g.cols();
  {
    // full column rank required for the projections to be well-defined
    GrowingQr qr(g.rows(), m);
    for (Index j = 0; j < m; ++j)
      if (!qr.trial_append(j + 1, g.col(j), Vec::Zero(g.rows())))
        fail(errc::rank_deficient, "columns are dependent");
  }
  if (m == 1) return {true, 0};  // vacuous: no other columns to project on
  for (Index j = 0; j < m; ++j) {
    Eigen::MatrixXd rest(g.rows(), m - 1);
    Index c = 0;
    for (Index k = 0; k < m; ++k)
      if (k != j) rest.col(c++) = g.col(k);
    auto [x, nonneg] = nnls_gate(rest, g.col(j));
    if (nonneg) return {true, j};
  }
  return {false, -1};
}

}  // namespace chincl
