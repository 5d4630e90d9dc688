#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "espider/special.hpp"
#include "espider/stationary.hpp"

#include <cmath>
#include <numbers>

using namespace espider;
using namespace espider::stat;

namespace {

double binom(int n, int k) { return std::exp(special::ln_binomial(n, k)); }

// Direct moment sums from the log-space law (independent route).
void direct_moments(double rho, int N, double& mean, double& var) {
  LogProbVector probs = stationary_log_probs(rho, N);
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k <= N; ++k) {
    double p = probs[k].to_double();
    m1 += k * p;
    m2 += static_cast<double>(k) * k * p;
  }
  mean = m1;
  var = m2 - m1 * m1;
}

}  // namespace

TEST_CASE("g closed forms") {
  // N = 1: 2F1(-1,1;2;-rho) = 1 + rho/2, so g = 2/(2+rho).
  for (double rho : {0.2, 1.0, 3.5})
    CHECK(g(rho, 1).to_double() ==
          doctest::Approx(2.0 / (2.0 + rho)).epsilon(1e-14));
  // rho = 1: g = 2 C(2N,N) / (C(2N,N) + 4^N).
  for (int N : {1, 3, 10, 25}) {
    double C = binom(2 * N, N);
    CHECK(g(1.0, N).to_double() ==
          doctest::Approx(2.0 * C / (C + std::pow(4.0, N))).epsilon(1e-12));
  }
  // Reference cell: g(0.25, 100) = rho(0) = 0.754044.
  CHECK(g(0.25, 100).to_double() == doctest::Approx(0.754044).epsilon(5e-6));
  CHECK(g(1.0, 1).to_double() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(g(-1.0, 5), std::domain_error);
}

TEST_CASE("rho_k values and identities") {
  // rho(0) == g exactly (same code path, zero offset).
  for (double rho : {0.25, 1.0, 4.0})
    for (int N : {1, 10, 500})
      CHECK(rho_k(0, rho, N).log_mag == g(rho, N).log_mag);
  // Tail cell from the N = 1000 reference block: rho(100) at rho = 0.5
  // is 1.77512e-35 (checked against the source table; a build-contract
  // example misquotes the exponent as -65, which belongs to rho = 0.25).
  SignedLog tail = rho_k(100, 0.5, 1000);
  CHECK(tail.log10_mag() == doctest::Approx(std::log10(1.77512e-35)).epsilon(1e-7));
  // Deep tail magnitude: exponent -1203 at N = 1000, rho = 0.25, k = 1000.
  CHECK(std::floor(rho_k(1000, 0.25, 1000).log10_mag()) == -1203.0);
  CHECK_THROWS_AS(rho_k(5, 1.0, 4), std::domain_error);
}

TEST_CASE("normalization across regimes") {
  for (double rho : {0.1, 1.0 / 3.0, 1.0, 3.0, 10.0})
    for (int N : {1, 2, 5, 17, 50, 100, 500}) {
      LogProbVector probs = stationary_log_probs(rho, N);
      double sum = 0.0;
      for (const SignedLog& p : probs) sum += p.to_double();
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("moments against direct sums and hand values") {
  // N = 1, rho = 1: law is (2/3, 1/3).
  Moments m = moments(1.0, 1);
  CHECK(m.mean == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(m.variance == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
  CHECK(m.cv == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  for (double rho : {0.3, 1.0, 2.5})
    for (int N : {2, 8, 40}) {
      Moments mm = moments(rho, N);
      double dm, dv;
      direct_moments(rho, N, dm, dv);
      CHECK(mm.mean == doctest::Approx(dm).epsilon(1e-9));
      CHECK(mm.variance == doctest::Approx(dv).epsilon(1e-9));
      CHECK(mm.cv == doctest::Approx(std::sqrt(dv) / dm).epsilon(1e-9));
    }
}

TEST_CASE("symmetric-rate moment forms") {
  // At rho = 1 the mean and variance reduce to binomial-ratio forms.
  for (int N : {1, 5, 20}) {
    double C = binom(2 * N, N);
    double q = C / (C + std::pow(4.0, N));
    Moments m = moments(1.0, N);
    CHECK(m.mean == doctest::Approx(N * q).epsilon(1e-12));
    CHECK(m.variance ==
          doctest::Approx(0.5 * N * (1.0 - q * (1.0 + 2.0 * N * q)))
              .epsilon(1e-11));
  }
}

TEST_CASE("large-N approximation of g") {
  // Reference cells. The N=500/1000 source-table cells follow the
  // displayed formula; its true value at (0.25, 100) is 0.754035 (the
  // source table prints 0.75298 there, inconsistent with its own
  // formula -- see the decisions ledger).
  CHECK(g_approx(0.25, 100).to_double() == doctest::Approx(0.7540353).epsilon(2e-6));
  CHECK(g_approx(0.5, 500).to_double() == doctest::Approx(0.502939).epsilon(2e-6));
  CHECK(g_approx(0.5, 1000).to_double() == doctest::Approx(0.501485).epsilon(2e-6));
  // Relative error decreases with N at fixed rho.
  double prev = 1.0;
  for (int N : {100, 500, 1000}) {
    double rel = std::fabs(
        std::expm1(g_approx(0.25, N).log_mag - g(0.25, N).log_mag));
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK_THROWS_AS(g_approx(1.0, 100), std::domain_error);
  CHECK_THROWS_AS(g_approx(1.5, 100), std::domain_error);
}

TEST_CASE("large-N limits") {
  LargeNLimits sup = limits_large_N(2.0);
  CHECK(sup.mean_diverges);
  CHECK(sup.var_diverges);
  CHECK(sup.cv == 0.0);

  LargeNLimits crit = limits_large_N(1.0);
  CHECK(crit.cv == doctest::Approx(std::sqrt(std::numbers::pi / 2.0 - 1.0)));
  CHECK(crit.cv == doctest::Approx(0.7555).epsilon(1e-4));

  LargeNLimits sub = limits_large_N(0.5);
  CHECK_FALSE(sub.mean_diverges);
  CHECK(sub.mean == doctest::Approx(1.0));
  // Exact moments approach the limits at rate 1/N (mean, variance) and
  // 1/sqrt(N) (cv at rho = 1); measured gaps at N = 2000 are 4.9e-3,
  // 1.1e-2 and 1.3e-2, shrinking by the rate factor at 4N.
  Moments m = moments(0.5, 2000);
  Moments m4 = moments(0.5, 8000);
  double mean_err = std::fabs(m.mean - sub.mean);
  double mean_err4 = std::fabs(m4.mean - sub.mean);
  CHECK(mean_err < 5.5e-3);
  CHECK(mean_err4 / mean_err < 0.30);
  double var_rel = std::fabs(m.variance / sub.variance - 1.0);
  double var_rel4 = std::fabs(m4.variance / sub.variance - 1.0);
  CHECK(var_rel < 1.2e-2);
  CHECK(var_rel4 / var_rel < 0.30);
  Moments m1 = moments(1.0, 2000);
  Moments m14 = moments(1.0, 8000);
  double cv_err = std::fabs(m1.cv - crit.cv);
  CHECK(cv_err < 1.4e-2);
  CHECK(std::fabs(m14.cv - crit.cv) / cv_err < 0.55);
}

TEST_CASE("entropy behaviour") {
  // Bounded by the uniform law.
  for (int N : {1, 4, 12})
    for (double rho : {0.3, 1.0, 6.0})
      CHECK(entropy(rho, N) <= std::log(N + 1.0) + 1e-12);
  // Degenerate limit: mass concentrates at k = 0.
  CHECK(entropy(1e-8, 1) < 1e-6);
  // Reference maxima.
  CHECK(entropy_argmax(2).m == doctest::Approx(2.45).epsilon(0.005));
  CHECK(entropy_argmax(10).m == doctest::Approx(2.47).epsilon(0.005));
  CHECK(entropy_argmax(30).m == doctest::Approx(1.95).epsilon(0.006));
  CHECK(entropy_argmax(2).candidates.size() == 1);
}

TEST_CASE("classical-model identity") {
  // N = 1 by hand: c = (1/4)(2*2 + 2*1) = 3/2; q0 = 1/2, q1 = 1/4.
  ClassicalComparison cc1 = classical_comparison(1);
  CHECK(cc1.c_const == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(cc1.holds);
  CHECK(rho_k(1, 1.0, 1).to_double() / rho_k(0, 1.0, 1).to_double() ==
        doctest::Approx(0.5).epsilon(1e-13));
  for (int N = 1; N <= 30; ++N) CHECK(classical_comparison(N).holds);
}

TEST_CASE("mode location follows the ratio test") {
  // rho(k+1)/rho(k) = rho (N-k) / (N+k+1).
  for (double rho : {0.4, 1.0, 2.0, 9.0})
    for (int N : {3, 12, 40}) {
      LogProbVector probs = stationary_log_probs(rho, N);
      int argmax = 0;
      for (int k = 1; k <= N; ++k)
        if (probs[k].log_mag > probs[argmax].log_mag) argmax = k;
      int expected = 0;
      while (expected < N &&
             rho * (N - expected) / (N + expected + 1.0) > 1.0)
        ++expected;
      CHECK(argmax == expected);
      if (rho < 1.0) CHECK(argmax == 0);
      // Ratio identity itself.
      for (int k = 0; k < N; k += 5)
        CHECK(std::exp(probs[k + 1].log_mag - probs[k].log_mag) ==
              doctest::Approx(rho * (N - k) / (N + k + 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("summary bundles the pieces consistently") {
  StationarySummary s = stationary_summary(0.8, 12);
  CHECK(s.probs.size() == 13);
  CHECK(s.mean == doctest::Approx(moments(0.8, 12).mean));
  CHECK(s.entropy == doctest::Approx(entropy(0.8, 12)));
}
