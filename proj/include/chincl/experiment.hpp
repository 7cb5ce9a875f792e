#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chincl/channel.hpp"

namespace chincl {

enum class Algorithm { alg1, alg2, lp, basis_pursuit };

Algorithm algorithm_from_name(const std::string& name);
const char* algorithm_name(Algorithm a);

struct ExperimentSpec {
  Index n1 = 3, m1 = 3, n2 = 3, m2 = 3;
  std::vector<int> betas{1, 2, 3, 4, 5};
  long trials = 100;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::alg2;
  int threads = 1;
  double epsilon = 1e-8;
  double inclusion_tol = 1e-7;
  bool shuffle_atoms = false;
  std::uint64_t shuffle_seed = 0;
};

/// One planted trial. `value` is the LP deficiency (lp/basis_pursuit rows,
/// where it doubles as the objective); OMP rows carry the outcome fields.
/// Wall time is tracked in memory only; the CSV emitters skip it so that
/// reruns of the same spec are byte-identical.
struct TrialRecord {
  std::uint64_t stream_seed = 0;
  int beta = 0;
  long trial = 0;
  bool f = false;
  int s1 = 0;
  long t_act = 0;
  long backtracks = 0;
  double residue_inf = 0.0;
  double value = 0.0;
  double wall_ms = 0.0;
};

struct BetaSummary {
  int beta = 0;
  long trials = 0;
  long failures = 0;
  double rate = 0.0;
  double mean_t_act = 0.0;
  long max_t_act = 0;
  double mean_s1 = 0.0;
  int max_s1 = 0;
  double max_residue = 0.0;
};

/// Runs `spec.trials` planted instances per beta through the chosen
/// algorithm. Records (sorted by beta then trial) are appended to
/// `records` when given. Trials run on a worker pool when spec.threads >
/// 1; per-trial RNG streams make the result schedule-independent.
std::vector<BetaSummary> run_failure_experiment(const ExperimentSpec& spec,
                                                std::vector<TrialRecord>* records = nullptr);

/// CSV emission. Fixed columns:
///   records: beta,trial,stream_seed,f,s1,t_act,backtracks,residue_inf,value
///   summary: beta,trials,failures,rate,mean_t_act,max_t_act
std::string records_csv(const std::vector<TrialRecord>& records);
std::string summary_csv(const std::vector<BetaSummary>& summary);

}  // namespace chincl
