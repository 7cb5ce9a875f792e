#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <vector>

#include "chincl/lp.hpp"
#include "chincl/omp.hpp"
#include "chincl/rng.hpp"
#include "test_util.hpp"

using namespace chincl;
using testutil::golden_k1;
using testutil::golden_k2;

namespace {

bool throws_with(errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code() == code;
  }
  return false;
}

/// Independent optimum oracle for small inequality-form LPs: enumerate all
/// vertex candidates (active sets of size n drawn from rows and bounds),
/// keep the feasible ones, take the best objective.
double brute_force_lp_min(const Vec& c, const Eigen::MatrixXd& a, const Vec& b) {
  const Index n = c.size(), m = b.size();
  const Index total = m + n;
  std::vector<Index> pick;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<Index>(pick.size()) == n) {
      Eigen::MatrixXd sys(n, n);
      Vec rhs(n);
      for (Index i = 0; i < n; ++i) {
        const Index sel = pick[static_cast<std::size_t>(i)];
        if (sel < m) {
          sys.row(i) = a.row(sel);
          rhs(i) = b(sel);
        } else {
          sys.row(i).setZero();
          sys(i, sel - m) = 1.0;
          rhs(i) = 0.0;
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
      if (lu.rank() < n) return;
      Vec x = lu.solve(rhs);
      if ((x.array() >= -1e-9).all() && ((a * x - b).array() <= 1e-9).all())
        best = std::min(best, c.dot(x));
      return;
    }
    for (Index j = start; j < total; ++j) {
      pick.push_back(j);
      rec(j + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

/// Independent formulation of the deficiency LP: per-entry bounds with an
/// explicit equality row, solved by the same kernel through a different
/// constraint assembly.
double deficiency_second_form(const AtomSystem& sys) {
  const Index p = sys.h.size(), n2 = sys.n2;
  const Index q = static_cast<Index>(sys.column_count());
  LpProblem lp;
  lp.objective = Vec::Zero(q + n2);
  lp.objective.tail(n2).setOnes();
  const Index rows = 2 * p + 1;
  lp.a = Eigen::MatrixXd::Zero(rows, q + n2);
  lp.b = Vec(rows);
  lp.row_types.assign(static_cast<std::size_t>(rows), RowType::le);
  for (Index r = 0; r < p; ++r) {
    const Index i = r % n2;
    lp.a.block(r, 0, 1, q) = sys.a.row(r);
    lp.a(r, q + i) = -1.0;
    lp.b(r) = sys.h(r);
    lp.a.block(p + r, 0, 1, q) = -sys.a.row(r);
    lp.a(p + r, q + i) = -1.0;
    lp.b(p + r) = -sys.h(r);
  }
  lp.a.block(2 * p, 0, 1, q).setOnes();
  lp.b(2 * p) = 1.0;
  lp.row_types.back() = RowType::eq;
  return solve_lp(lp).optimum;
}

}  // namespace

TEST_CASE("kernel: one-variable bound") {
  LpProblem lp;
  lp.objective = Vec::Ones(1);
  lp.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  lp.b = Vec::Constant(1, -3.0);  // -x <= -3, i.e. x >= 3
  lp.row_types = {RowType::le};
  LpSolution sol = solve_lp(lp);
  CHECK(sol.optimum == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.x(0) == doctest::Approx(3.0));
}

TEST_CASE("kernel: equality rows") {
  LpProblem lp;
  lp.objective = Vec(2);
  lp.objective << 1.0, 2.0;
  lp.a = Eigen::MatrixXd(1, 2);
  lp.a << 1.0, 1.0;
  lp.b = Vec::Constant(1, 1.0);
  lp.row_types = {RowType::eq};
  LpSolution sol = solve_lp(lp);
  CHECK(sol.optimum == doctest::Approx(1.0));
  CHECK(sol.x(0) == doctest::Approx(1.0));
}

TEST_CASE("kernel: unbounded and infeasible are reported") {
  LpProblem down;
  down.objective = Vec::Constant(1, -1.0);
  down.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  down.b = Vec::Constant(1, 0.0);
  down.row_types = {RowType::le};
  CHECK(throws_with(errc::unbounded, [&] { solve_lp(down); }));

  LpProblem none;
  none.objective = Vec::Ones(1);
  none.a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  none.b = Vec::Constant(1, -1.0);  // x <= -1 with x >= 0
  none.row_types = {RowType::le};
  CHECK(throws_with(errc::infeasible, [&] { solve_lp(none); }));
}

TEST_CASE("kernel: degenerate cycling-prone instance terminates at the oracle optimum") {
  // classic degenerate instance; the entering-rule discipline must not cycle
  LpProblem lp;
  lp.objective = Vec(4);
  lp.objective << -0.75, 150.0, -0.02, 6.0;
  lp.a = Eigen::MatrixXd(3, 4);
  lp.a << 0.25, -60.0, -1.0 / 25.0, 9.0, 0.5, -90.0, -1.0 / 50.0, 3.0, 0.0, 0.0, 1.0, 0.0;
  lp.b = Vec(3);
  lp.b << 0.0, 0.0, 1.0;
  lp.row_types = {RowType::le, RowType::le, RowType::le};
  LpSolution sol = solve_lp(lp);
  const double oracle = brute_force_lp_min(lp.objective, lp.a, lp.b);
  CHECK(oracle == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(sol.optimum == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("kernel matches the vertex oracle on random small LPs") {
  SplitMix64 rng(31);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    const Index n = 2 + static_cast<Index>(rng.next_below(3));
    const Index m = 2 + static_cast<Index>(rng.next_below(3));
    Eigen::MatrixXd a(m, n);
    Vec b(m), c(n);
    for (Index r = 0; r < m; ++r) {
      for (Index j = 0; j < n; ++j) a(r, j) = rng.next_unit() * 2.0 - 0.5;
      b(r) = rng.next_unit() * 2.0;
    }
    for (Index j = 0; j < n; ++j) c(j) = rng.next_unit() * 2.0 - 1.0;
    // keep the region bounded so the oracle covers the optimum
    Eigen::MatrixXd a2(m + 1, n);
    a2.topRows(m) = a;
    a2.bottomRows(1).setOnes();
    Vec b2(m + 1);
    b2.head(m) = b;
    b2(m) = 3.0;
    LpProblem lp{c, a2, b2, std::vector<RowType>(static_cast<std::size_t>(m + 1), RowType::le)};
    double got;
    try {
      got = solve_lp(lp).optimum;
    } catch (const error& e) {
      CHECK(e.code() == errc::infeasible);
      continue;
    }
    const double oracle = brute_force_lp_min(c, a2, b2);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("deficiency: reflexive inclusion is zero") {
  SplitMix64 rng(41);
  Channel k = random_channel(3, 3, rng);
  DeficiencyResult res = shannon_deficiency(build_system(k, k, true));
  CHECK(res.value <= 1e-9);
  CHECK(res.included);
  CHECK(res.g_full.minCoeff() >= 0.0);
  CHECK(res.g_full.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("deficiency: binary erasure versus symmetric, frozen endpoints") {
  // boundary: included exactly at eps = 2p
  DeficiencyResult in = shannon_deficiency(build_system(make_bec(0.2), make_bsc(0.1), true));
  CHECK(in.value <= 1e-9);
  CHECK(in.included);

  // outside: optimum equals eps - 2p for this family (cross-checked against
  // an independent solver offline and the second formulation here)
  DeficiencyResult out = shannon_deficiency(build_system(make_bec(0.3), make_bsc(0.1), true));
  CHECK(out.value == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(!out.included);

  DeficiencyResult mid = shannon_deficiency(build_system(make_bec(0.25), make_bsc(0.1), true));
  CHECK(mid.value == doctest::Approx(0.05).epsilon(1e-9));

  AtomSystem sys = build_system(make_bec(0.3), make_bsc(0.1), true);
  CHECK(deficiency_second_form(sys) == doctest::Approx(out.value).epsilon(1e-9));

  // single-atom sweep upper-bounds the optimum and stays in the same range
  double single_best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < sys.column_count(); ++c) {
    double rowmax = 0.0;
    for (Index i = 0; i < sys.n2; ++i) {
      double m = 0.0;
      for (Index j = 0; j < sys.m2; ++j)
        m = std::max(m, std::abs(sys.a(j * sys.n2 + i, static_cast<Index>(c)) - sys.h(j * sys.n2 + i)));
      rowmax += m;
    }
    single_best = std::min(single_best, rowmax);
  }
  CHECK(single_best >= out.value - 1e-12);
  CHECK(single_best <= 0.5);
}

TEST_CASE("deficiency: planted instances land at zero") {
  SplitMix64 rng(47);
  for (int beta : {1, 3, 5}) {
    for (int i = 0; i < 5; ++i) {
      PlantedInstance inst = plant_instance(3, 3, 3, 3, beta, rng);
      DeficiencyResult res = shannon_deficiency(build_system(inst.k1, inst.k2, true));
      CHECK(res.value <= 1e-9);
      InclusionCertificate cert = support_certificate(build_system(inst.k1, inst.k2, true), res.g_full);
      CHECK(cert.residual_inf <= kInclusionTol * 1.1);
    }
  }
}

TEST_CASE("deficiency: golden pair is strictly positive both ways") {
  AtomSystem fwd = restrict_to_permutations(build_system(golden_k1(), golden_k2(), true));
  DeficiencyResult f = shannon_deficiency(fwd);
  CHECK(f.value == doctest::Approx(0.160416666666667).epsilon(1e-8));
  CHECK(!f.included);

  AtomSystem bwd = restrict_to_permutations(build_system(golden_k2(), golden_k1(), true));
  DeficiencyResult b = shannon_deficiency(bwd);
  CHECK(b.value == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  CHECK(!b.included);
}

TEST_CASE("deficiency: column generation agrees with the full solve") {
  SplitMix64 rng(53);
  Channel k1 = random_channel(3, 3, rng);
  Channel k2 = random_channel(3, 3, rng);
  AtomSystem sys = build_system(k1, k2, true);
  DeficiencyResult full = shannon_deficiency(sys);
  DeficiencyOptions pooled;
  pooled.pool_threshold = 50;  // force the pooled path on a 729-column system
  pooled.pool_random = 40;
  DeficiencyResult gen = shannon_deficiency(sys, pooled);
  CHECK(gen.value == doctest::Approx(full.value).epsilon(1e-8));
}

TEST_CASE("inclusion is transitive via certificate composition") {
  SplitMix64 rng(59);
  for (int i = 0; i < 10; ++i) {
    PurePlanted ab = plant_pure_certificate(2, 2, 2, 2, 2, rng);
    // plant K3 included in K2
    SplitMix64 fork(rng.next_u64());
    InclusionCertificate bc;
    Mat k3 = Mat::Zero(2, 2);
    Vec g = random_prob_vector(2, fork);
    for (int a = 0; a < 2; ++a) {
      PurePair pair{random_pure(2, 2, fork), random_pure(2, 2, fork)};
      k3 += g(a) * pure_product(pair.pre, ab.k2.matrix(), pair.post);
      bc.atoms.push_back(pair);
      bc.weights.push_back(g(a));
    }
    Channel k3c = Channel::validate(k3);

    CHECK(shannon_deficiency(build_system(ab.k1, ab.k2, true)).value <= 1e-9);
    CHECK(shannon_deficiency(build_system(ab.k2, k3c, true)).value <= 1e-9);
    CHECK(shannon_deficiency(build_system(ab.k1, k3c, true)).value <= 1e-9);

    // composed witness: products of pure pairs certify the composition
    InclusionCertificate ac;
    for (std::size_t x = 0; x < bc.atoms.size(); ++x)
      for (std::size_t y = 0; y < ab.cert.atoms.size(); ++y) {
        PureChannel pre(2, 2, {ab.cert.atoms[y].pre.target(bc.atoms[x].pre.target(0)),
                               ab.cert.atoms[y].pre.target(bc.atoms[x].pre.target(1))});
        PureChannel post(2, 2, {bc.atoms[x].post.target(ab.cert.atoms[y].post.target(0)),
                                bc.atoms[x].post.target(ab.cert.atoms[y].post.target(1))});
        ac.atoms.push_back(PurePair{pre, post});
        ac.weights.push_back(bc.weights[x] * ab.cert.weights[y]);
      }
    CHECK(certificate_residual(ab.k1, k3c, ac) <= 1e-10);
  }
}

TEST_CASE("basis pursuit: objective one on feasible systems") {
  SplitMix64 rng(61);
  Channel k = random_channel(2, 2, rng);
  Vec g = basis_pursuit(build_system(k, k, true));
  CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g.minCoeff() >= 0.0);

  PurePlanted inst = plant_pure_certificate(3, 3, 3, 3, 3, rng);
  AtomSystem sys = build_system(inst.k1, inst.k2, true);
  Vec gp = basis_pursuit(sys);
  CHECK(gp.sum() == doctest::Approx(1.0).epsilon(1e-9));
  InclusionCertificate cert = support_certificate(sys, gp);
  CHECK(cert.residual_inf <= 1e-9);
}

TEST_CASE("basis pursuit: no-inclusion pair is infeasible") {
  AtomSystem sys = build_system(make_bec(0.5), make_bsc(0.1), true);
  CHECK(throws_with(errc::infeasible, [&] { basis_pursuit(sys); }));
}
