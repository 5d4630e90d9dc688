#ifndef ESPIDER_MONTECARLO_HPP
#define ESPIDER_MONTECARLO_HPP

#include "espider/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace espider::mc {

using chain::ChainState;
using chain::ModelParams;

/// One realized path: epoch times and the state holding from each epoch
/// (right-continuous). jump_times[0] == 0 carries the initial state.
struct Trajectory {
  std::vector<double> jump_times;
  std::vector<ChainState> states;
  std::uint64_t seed = 0;

  /// State holding at time t (right-continuous convention).
  ChainState state_at(double t) const;

  /// Deterministic byte serialization (reproducibility checks).
  std::string serialize() const;
};

/// Exact-in-distribution Gillespie path up to `horizon`: exponential
/// holding times at the total exit rate, categorical jump choice
/// proportional to the rates; at the origin the next ray is drawn from
/// row l of C jointly with the lambda*N exit clock.
Trajectory simulate_path(const ModelParams& p, double horizon,
                         const ChainState& init, std::uint64_t seed);

/// Empirical level distribution at a fixed time.
struct EstimateTable {
  double t = 0.0;
  long n_runs = 0;
  std::uint64_t seed = 0;
  std::vector<long> counts;      // by level 0..N
  std::vector<double> point;     // counts / n_runs
  std::vector<double> ci_low;    // 95% normal-approximation interval
  std::vector<double> ci_high;   // (rule-of-three guard at p_hat in {0,1})
  // Filled when by_ray is requested: level-major (N+1) x d tallies; the
  // origin rows tally the remembered last ray.
  std::vector<long> ray_counts;
};

/// n_runs independent paths (stream i derived from (seed, i)), each
/// sampled at every requested time; one table per time. Runs are
/// distributed over worker threads; tallies land in per-run slots so the
/// result is independent of scheduling.
std::vector<EstimateTable> estimate_pk_multi(const ModelParams& p,
                                             const std::vector<double>& times,
                                             long n_runs, std::uint64_t seed,
                                             const ChainState& init,
                                             bool by_ray = false);

EstimateTable estimate_pk(const ModelParams& p, double t, long n_runs,
                          std::uint64_t seed,
                          const ChainState& init = ChainState::origin(1));

}  // namespace espider::mc

#endif
