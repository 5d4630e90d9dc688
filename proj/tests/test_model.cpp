#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "espider/model.hpp"
#include "espider/stationary.hpp"

#include <cmath>

using namespace espider::chain;

namespace {

ModelParams params(double lambda, double mu, int N, int d, SwitchKind kind,
                   double p = 0.5) {
  ModelParams mp;
  mp.lambda = lambda;
  mp.mu = mu;
  mp.capacity = N;
  mp.rays = d;
  mp.switching = example_switch_matrix(kind, d, p);
  return mp;
}

}  // namespace

TEST_CASE("transition rates from the defining scheme") {
  ModelParams mp = params(1.0, 1.0, 3, 2, SwitchKind::Uniform);
  // Top level is reflecting: no upward rate out of k = N.
  CHECK(transition_rate(ChainState::interior(3, 1), ChainState::interior(4, 1),
                        mp) == 0.0);
  // Downward rate mu (N + k).
  CHECK(transition_rate(ChainState::interior(2, 1), ChainState::interior(1, 1),
                        mp) == doctest::Approx(5.0));
  // Out of the origin: c_{l,j} lambda N.
  CHECK(transition_rate(ChainState::origin(1), ChainState::interior(1, 2), mp) ==
        doctest::Approx(1.5));
  // No ray change away from the origin, no level jumps of size > 1.
  CHECK(transition_rate(ChainState::interior(2, 1), ChainState::interior(3, 2),
                        mp) == 0.0);
  CHECK(transition_rate(ChainState::interior(1, 1), ChainState::interior(3, 1),
                        mp) == 0.0);
  // Upward rate lambda (N - k).
  CHECK(transition_rate(ChainState::interior(1, 2), ChainState::interior(2, 2),
                        mp) == doctest::Approx(2.0));
}

TEST_CASE("generator structure") {
  ModelParams mp = params(1.3, 0.8, 4, 3, SwitchKind::Cyclic);
  Generator g = build_generator(mp);
  CHECK(g.dim == 3 * 5);
  // Row sums vanish (conservative generator).
  for (int i = 0; i < g.dim; ++i) {
    double sum = 0.0;
    for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) sum += g.val[k];
    CHECK(std::fabs(sum) < 1e-12);
  }
  // Off-diagonal support matches the skip-free star-graph adjacency.
  for (int i = 0; i < g.dim; ++i) {
    ChainState from = state_at(mp, i);
    for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
      if (g.col[k] == i) continue;
      ChainState to = state_at(mp, g.col[k]);
      CHECK(g.val[k] > 0.0);
      if (from.at_origin()) {
        CHECK(to.level == 1);
      } else {
        CHECK(std::abs(to.level - from.level) == 1);
        if (to.level > 0) CHECK(to.ray == from.ray);
        if (to.level == 0) CHECK(to.ray == from.ray);
      }
      CHECK(g.val[k] == doctest::Approx(transition_rate(from, to, mp)));
    }
  }
  // d = 1 reduces to the single-ray birth-death chain (tridiagonal).
  ModelParams one = params(1.0, 1.0, 5, 1, SwitchKind::Uniform);
  Generator g1 = build_generator(one);
  for (int i = 0; i < g1.dim; ++i)
    for (int k = g1.row_ptr[i]; k < g1.row_ptr[i + 1]; ++k)
      CHECK(std::abs(g1.col[k] - i) <= 1);
}

TEST_CASE("switching matrix catalogue") {
  SwitchMatrix u = example_switch_matrix(SwitchKind::Uniform, 3);
  for (int l = 1; l <= 3; ++l)
    for (int j = 1; j <= 3; ++j) CHECK(u.at(l, j) == doctest::Approx(1.0 / 3));

  SwitchMatrix ue = example_switch_matrix(SwitchKind::UniformExcl, 3);
  for (int l = 1; l <= 3; ++l) CHECK(ue.at(l, l) == 0.0);
  CHECK(ue.at(1, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(example_switch_matrix(SwitchKind::UniformExcl, 1),
                  std::domain_error);

  SwitchMatrix cy = example_switch_matrix(SwitchKind::Cyclic, 4);
  CHECK(cy.at(1, 2) == 1.0);
  CHECK(cy.at(4, 1) == 1.0);

  SwitchMatrix se = example_switch_matrix(SwitchKind::Sequential, 3);
  CHECK(se.at(1, 2) == 1.0);
  CHECK(se.at(2, 3) == 1.0);
  CHECK(se.at(3, 3) == 1.0);

  SwitchMatrix rw = example_switch_matrix(SwitchKind::RandomWalk, 4, 0.5);
  CHECK(rw.at(1, 2) == 1.0);
  CHECK(rw.at(4, 3) == 1.0);
  CHECK(rw.at(2, 1) == doctest::Approx(0.5));
  CHECK(rw.at(2, 3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(example_switch_matrix(SwitchKind::RandomWalk, 4, 1.2),
                  std::domain_error);
}

TEST_CASE("switch stationary vectors") {
  // Cyclic: uniform.
  auto pi = switch_stationary(example_switch_matrix(SwitchKind::Cyclic, 5));
  for (double v : pi) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));

  // Sequential: mass on the absorbing ray d.
  pi = switch_stationary(example_switch_matrix(SwitchKind::Sequential, 4));
  CHECK(pi[0] == doctest::Approx(0.0));
  CHECK(pi[1] == doctest::Approx(0.0));
  CHECK(pi[2] == doctest::Approx(0.0));
  CHECK(pi[3] == doctest::Approx(1.0));

  // Random walk p = 1/2: (1/(2(d-1)), 1/(d-1), ..., 1/(2(d-1))).
  pi = switch_stationary(example_switch_matrix(SwitchKind::RandomWalk, 4, 0.5));
  CHECK(pi[0] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi[3] == doctest::Approx(1.0 / 6).epsilon(1e-12));

  // Random walk p != 1/2 against the closed form.
  for (int d : {3, 4, 5, 6})
    for (double p : {0.2, 0.3, 0.7}) {
      auto got = switch_stationary(example_switch_matrix(SwitchKind::RandomWalk, d, p));
      double pid = (p - 1.0) * (2.0 * p - 1.0) /
                   (2.0 * p * (p - 1.0 + std::pow(1.0 / p - 1.0, d) * p));
      std::vector<double> want(d);
      want[d - 1] = pid;
      want[0] = std::pow(1.0 / p - 1.0, d - 2) * pid;
      for (int j = 2; j <= d - 1; ++j)
        want[j - 1] = std::pow(1.0 / p - 1.0, d - j) * pid / (1.0 - p);
      for (int j = 0; j < d; ++j)
        CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
      // And it is indeed stationary: pi C = pi.
      SwitchMatrix C = example_switch_matrix(SwitchKind::RandomWalk, d, p);
      for (int j = 1; j <= d; ++j) {
        double acc = 0.0;
        for (int l = 1; l <= d; ++l) acc += got[l - 1] * C.at(l, j);
        CHECK(acc == doctest::Approx(got[j - 1]).epsilon(1e-12));
      }
    }
}

TEST_CASE("level marginal is invariant in d and C") {
  for (int N : {2, 5})
    for (double lambda : {1.0, 2.0}) {
      std::vector<double> ref =
          generator_stationary_levels(params(lambda, 1.0, N, 1, SwitchKind::Uniform));
      for (int d : {2, 4})
        for (SwitchKind kind : {SwitchKind::Uniform, SwitchKind::Cyclic,
                                SwitchKind::Sequential, SwitchKind::RandomWalk}) {
          auto levels = generator_stationary_levels(params(lambda, 1.0, N, d, kind, 0.3));
          for (int k = 0; k <= N; ++k)
            CHECK(levels[k] == doctest::Approx(ref[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("stationary null vector marginal matches the closed form at N=2, d=2") {
  ModelParams mp = params(1.0, 1.0, 2, 2, SwitchKind::Uniform);
  auto levels = generator_stationary_levels(mp);
  for (int k = 0; k <= 2; ++k)
    CHECK(levels[k] ==
          doctest::Approx(espider::stat::rho_k(k, 1.0, 2).to_double())
              .epsilon(1e-12));
}

TEST_CASE("model JSON config round trip") {
  ModelParams mp = params(2.5, 0.7, 6, 3, SwitchKind::RandomWalk, 0.3);
  ModelParams back = ModelParams::from_json(mp.to_json());
  CHECK(back.lambda == mp.lambda);
  CHECK(back.mu == mp.mu);
  CHECK(back.capacity == mp.capacity);
  CHECK(back.rays == mp.rays);
  for (int l = 1; l <= 3; ++l)
    for (int j = 1; j <= 3; ++j)
      CHECK(back.switching.at(l, j) == mp.switching.at(l, j));

  ModelParams kind_form = ModelParams::from_json(
      R"({"lambda": 1.0, "mu": 2.0, "N": 4, "d": 3, "switch": {"kind": "cyclic"}})");
  CHECK(kind_form.switching.at(3, 1) == 1.0);

  CHECK_THROWS(ModelParams::from_json(
      R"({"lambda": -1.0, "mu": 2.0, "N": 4, "d": 3, "switch": {"kind": "cyclic"}})"));
}

TEST_CASE("state enumeration round trip") {
  ModelParams mp = params(1.0, 1.0, 4, 3, SwitchKind::Uniform);
  for (int i = 0; i < mp.state_count(); ++i)
    CHECK(state_index(mp, state_at(mp, i)) == i);
  CHECK(state_index(mp, ChainState::origin(2)) == 1);
  CHECK(state_index(mp, ChainState::interior(1, 1)) == 3);
}
