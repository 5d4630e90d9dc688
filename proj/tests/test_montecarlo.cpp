#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "espider/model.hpp"
#include "espider/montecarlo.hpp"
#include "espider/stationary.hpp"
#include "espider/transient.hpp"

#include <cmath>

using namespace espider;
using namespace espider::mc;
using chain::ChainState;
using chain::ModelParams;
using chain::SwitchKind;

namespace {

ModelParams params(double lambda, double mu, int N, int d,
                   SwitchKind kind = SwitchKind::Uniform) {
  ModelParams mp;
  mp.lambda = lambda;
  mp.mu = mu;
  mp.capacity = N;
  mp.rays = d;
  mp.switching = chain::example_switch_matrix(kind, d, 0.5);
  return mp;
}

}  // namespace

TEST_CASE("trajectories are reproducible byte for byte") {
  ModelParams mp = params(1.0, 1.0, 3, 2);
  Trajectory a = simulate_path(mp, 10.0, ChainState::origin(1), 987654321);
  Trajectory b = simulate_path(mp, 10.0, ChainState::origin(1), 987654321);
  CHECK(a.serialize() == b.serialize());
  Trajectory c = simulate_path(mp, 10.0, ChainState::origin(1), 987654322);
  CHECK(a.serialize() != c.serialize());
}

TEST_CASE("trajectory structure is valid") {
  ModelParams mp = params(1.5, 0.7, 4, 3, SwitchKind::Cyclic);
  Trajectory tr = simulate_path(mp, 50.0, ChainState::origin(2), 2024);
  REQUIRE(tr.jump_times.size() == tr.states.size());
  REQUIRE(tr.jump_times.size() > 10);
  CHECK(tr.jump_times.front() == 0.0);
  for (std::size_t i = 1; i < tr.jump_times.size(); ++i) {
    CHECK(tr.jump_times[i] > tr.jump_times[i - 1]);
    // Consecutive states must be linked by a positive rate.
    CHECK(chain::transition_rate(tr.states[i - 1], tr.states[i], mp) > 0.0);
  }
  // Right-continuous sampling.
  CHECK(tr.state_at(0.0) == ChainState::origin(2));
  CHECK(tr.state_at(tr.jump_times[3]) == tr.states[3]);
}

TEST_CASE("top level only moves down") {
  ModelParams mp = params(2.0, 0.5, 2, 1);
  Trajectory tr = simulate_path(mp, 200.0, ChainState::origin(1), 77);
  for (std::size_t i = 1; i < tr.states.size(); ++i)
    if (tr.states[i - 1].level == mp.capacity)
      CHECK(tr.states[i].level == mp.capacity - 1);
}

TEST_CASE("estimate at t = 0 is the initial law") {
  ModelParams mp = params(1.0, 1.0, 3, 2);
  EstimateTable e = estimate_pk(mp, 0.0, 500, 5, ChainState::origin(1));
  CHECK(e.counts[0] == 500);
  CHECK(e.point[0] == 1.0);
}

TEST_CASE("empirical law near the closed-form transient") {
  ModelParams mp = params(1.0, 1.0, 3, 2);
  const long runs = 10000;
  EstimateTable e = estimate_pk(mp, 2.0, runs, 31337, ChainState::origin(1));
  auto truth = transient::closed_level_distribution(2.0, 3, 1.0);
  for (int k = 0; k <= 3; ++k) {
    double se = std::sqrt(truth[k] * (1.0 - truth[k]) / runs);
    CHECK(std::fabs(e.point[k] - truth[k]) < 4.0 * se + 1e-4);
  }
}

TEST_CASE("empirical law converges to the stationary law") {
  ModelParams mp = params(2.0, 1.0, 3, 2);
  const long runs = 10000;
  EstimateTable e = estimate_pk(mp, 20.0, runs, 5150, ChainState::origin(1));
  for (int k = 0; k <= 3; ++k) {
    double truth = stat::rho_k(k, 2.0, 3).to_double();
    double se = std::sqrt(truth * (1.0 - truth) / runs);
    CHECK(std::fabs(e.point[k] - truth) < 4.0 * se + 1e-4);
  }
}

TEST_CASE("ray memory at origin visits follows the switching law") {
  // Uniform switching makes consecutive ray draws independent, so a
  // plain chi-square test applies. 1e5 visits, 1% level: chi2(3) < 11.345.
  ModelParams mp = params(1.0, 1.0, 1, 4);
  std::vector<long> visits(4, 0);
  long total = 0;
  std::uint64_t seed = 99;
  while (total < 100000) {
    Trajectory tr = simulate_path(mp, 50000.0, ChainState::origin(1), seed++);
    for (std::size_t i = 0; i < tr.states.size() && total < 100000; ++i)
      if (tr.states[i].at_origin()) {
        ++visits[tr.states[i].ray - 1];
        ++total;
      }
  }
  double chi2 = 0.0;
  double expect = total / 4.0;
  for (long v : visits) chi2 += (v - expect) * (v - expect) / expect;
  CHECK(chi2 < 11.345);
}

TEST_CASE("interval construction") {
  ModelParams mp = params(1.0, 1.0, 2, 1);
  EstimateTable e = estimate_pk(mp, 0.5, 2000, 11, ChainState::origin(1));
  for (std::size_t k = 0; k < e.point.size(); ++k) {
    CHECK(e.ci_low[k] <= e.point[k]);
    CHECK(e.ci_high[k] >= e.point[k]);
    CHECK(e.ci_low[k] >= 0.0);
    CHECK(e.ci_high[k] <= 1.0);
  }
  long sum = 0;
  for (long c : e.counts) sum += c;
  CHECK(sum == e.n_runs);
  // Rule-of-three guard at an empty cell: t = 0 puts no mass at level 2.
  EstimateTable z = estimate_pk(mp, 0.0, 100, 3, ChainState::origin(1));
  CHECK(z.counts[2] == 0);
  CHECK(z.ci_high[2] == doctest::Approx(0.03));
  CHECK(z.ci_low[0] == doctest::Approx(0.97));
}

TEST_CASE("by-ray tallies partition the level counts") {
  ModelParams mp = params(1.0, 1.0, 2, 3, SwitchKind::Cyclic);
  auto tables = estimate_pk_multi(mp, {1.0}, 2000, 9, ChainState::origin(1), true);
  const EstimateTable& e = tables[0];
  REQUIRE(e.ray_counts.size() == 3u * 3u);
  for (int k = 0; k <= 2; ++k) {
    long sum = 0;
    for (int j = 0; j < 3; ++j) sum += e.ray_counts[k * 3 + j];
    CHECK(sum == e.counts[k]);
  }
}

TEST_CASE("multi-time sampling equals single-time sampling") {
  ModelParams mp = params(1.3, 0.9, 3, 2);
  auto multi = estimate_pk_multi(mp, {0.5, 1.5, 3.0}, 3000, 42,
                                 ChainState::origin(1));
  REQUIRE(multi.size() == 3);
  CHECK(multi[0].t == 0.5);
  CHECK(multi[2].t == 3.0);
  // Same seed, same stream derivation: the single-time call at the first
  // time must give identical counts (the path up to 0.5 is identical).
  EstimateTable single = estimate_pk(mp, 0.5, 3000, 42, ChainState::origin(1));
  for (std::size_t k = 0; k < single.counts.size(); ++k)
    CHECK(single.counts[k] == multi[0].counts[k]);
}
