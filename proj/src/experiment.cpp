#include "chincl/experiment.hpp"

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "chincl/io.hpp"
#include "chincl/lp.hpp"
#include "chincl/omp.hpp"
#include "chincl/rng.hpp"

namespace chincl {

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "alg1") return Algorithm::alg1;
  if (name == "alg2") return Algorithm::alg2;
  if (name == "lp") return Algorithm::lp;
  if (name == "basis_pursuit" || name == "bp") return Algorithm::basis_pursuit;
  fail(errc::parse_error, "unknown algorithm '" + name + "'");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg2: return "alg2";
    case Algorithm::lp: return "lp";
    case Algorithm::basis_pursuit: return "basis_pursuit";
  }
  return "?";
}

namespace {

TrialRecord run_one(const ExperimentSpec& spec, int beta, long trial) {
  TrialRecord rec;
  rec.beta = beta;
  rec.trial = trial;
  // stream key mixes beta so cells do not share instances
  const std::uint64_t key = spec.seed ^ (0x51'7c'c1'b7'27'22'0a'95ULL * static_cast<std::uint64_t>(beta));
  SplitMix64 rng = trial_stream(key, static_cast<std::uint64_t>(trial));
  rec.stream_seed = key;

  const auto t0 = std::chrono::steady_clock::now();
  PlantedInstance inst = plant_instance(spec.n1, spec.m1, spec.n2, spec.m2, beta, rng);

  const bool wants_lp = spec.algorithm == Algorithm::lp || spec.algorithm == Algorithm::basis_pursuit;
  AtomSystem sys = build_system(inst.k1, inst.k2, /*dedup=*/wants_lp);
  if (spec.shuffle_atoms) sys = shuffle_columns(sys, spec.shuffle_seed);

  switch (spec.algorithm) {
    case Algorithm::alg1:
    case Algorithm::alg2: {
      OmpConfig cfg;
      cfg.s = static_cast<int>(caratheodory_bound(spec.n2, spec.m2, false));
      cfg.epsilon = spec.epsilon;
      OmpOutcome out = spec.algorithm == Algorithm::alg1 ? run_alg1(sys, cfg) : run_alg2(sys, cfg);
      rec.f = out.f;
      rec.s1 = out.s1;
      rec.t_act = out.t_act;
      rec.backtracks = out.backtracks;
      rec.residue_inf = out.residue_inf;
      break;
    }
    case Algorithm::lp: {
      DeficiencyOptions opts;
      opts.inclusion_tol = spec.inclusion_tol;
      DeficiencyResult res = shannon_deficiency(sys, opts);
      rec.f = res.included;
      rec.value = res.value;
      rec.t_act = res.iterations;
      InclusionCertificate cert = support_certificate(sys, res.g_full);
      rec.s1 = static_cast<int>(cert.atom_indices.size());
      rec.residue_inf = cert.residual_inf;
      break;
    }
    case Algorithm::basis_pursuit: {
      Vec g = basis_pursuit(sys);
      rec.value = g.sum();
      rec.f = true;  // feasibility itself is the signal; infeasible throws
      InclusionCertificate cert = support_certificate(sys, g);
      rec.s1 = static_cast<int>(cert.atom_indices.size());
      rec.residue_inf = cert.residual_inf;
      break;
    }
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

std::vector<BetaSummary> run_failure_experiment(const ExperimentSpec& spec,
                                                std::vector<TrialRecord>* records) {
  if (spec.trials < 1) fail(errc::out_of_range, "trials must be >= 1");
  std::vector<BetaSummary> out;
  for (int beta : spec.betas) {
    std::vector<TrialRecord> recs(static_cast<std::size_t>(spec.trials));
    const int workers = std::max(1, spec.threads);
    if (workers == 1) {
      for (long i = 0; i < spec.trials; ++i) recs[static_cast<std::size_t>(i)] = run_one(spec, beta, i);
    } else {
      std::atomic<long> next{0};
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (long i = next.fetch_add(1); i < spec.trials; i = next.fetch_add(1))
            recs[static_cast<std::size_t>(i)] = run_one(spec, beta, i);
        });
      for (auto& th : pool) th.join();
    }

    BetaSummary su;
    su.beta = beta;
    su.trials = spec.trials;
    for (const auto& r : recs) {
      if (!r.f) ++su.failures;
      su.mean_t_act += static_cast<double>(r.t_act);
      su.max_t_act = std::max(su.max_t_act, r.t_act);
      su.mean_s1 += static_cast<double>(r.s1);
      su.max_s1 = std::max(su.max_s1, r.s1);
      su.max_residue = std::max(su.max_residue, r.f ? r.residue_inf : 0.0);
    }
    su.rate = static_cast<double>(su.failures) / static_cast<double>(su.trials);
    su.mean_t_act /= static_cast<double>(su.trials);
    su.mean_s1 /= static_cast<double>(su.trials);
    out.push_back(su);
    if (records) records->insert(records->end(), recs.begin(), recs.end());
  }
  return out;
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "beta,trial,stream_seed,f,s1,t_act,backtracks,residue_inf,value\n";
  for (const auto& r : records)
    os << r.beta << ',' << r.trial << ',' << r.stream_seed << ',' << (r.f ? 1 : 0) << ',' << r.s1
       << ',' << r.t_act << ',' << r.backtracks << ',' << format_double(r.residue_inf) << ','
       << format_double(r.value) << '\n';
  return os.str();
}

std::string summary_csv(const std::vector<BetaSummary>& summary) {
  std::ostringstream os;
  os << "beta,trials,failures,rate,mean_t_act,max_t_act\n";
  for (const auto& s : summary)
    os << s.beta << ',' << s.trials << ',' << s.failures << ',' << format_double(s.rate) << ','
       << format_double(s.mean_t_act) << ',' << s.max_t_act << '\n';
  return os.str();
}

}  // namespace chincl
