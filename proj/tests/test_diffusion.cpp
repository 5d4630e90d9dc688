#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "espider/diffusion.hpp"
#include "espider/numeric.hpp"

#include <cmath>
#include <numbers>

using namespace espider;
using namespace espider::diff;
using chain::SwitchKind;

TEST_CASE("scaling map") {
  // lambda = mu gives a centered limit (beta = 0).
  DiffusionParams sym = params_from_rates(1.0, 1.0, 0.1, 5000);
  CHECK(sym.gamma == 0.0);
  CHECK(sym.beta() == 0.0);
  CHECK(sym.alpha == doctest::Approx(2.0));
  CHECK(sym.sigma2() == doctest::Approx(100.0));  // alpha N eps^2
  DiffusionParams big = params_from_rates(1.0, 1.0, 0.1, 15000);
  CHECK(big.sigma2() == doctest::Approx(300.0));
  // Forward map and its inverse.
  DiffusionParams p = scale_params(2.0, 1.5, 3.0, 0.05);
  CHECK(p.lambda() == doctest::Approx(1.0 + 0.5 * 1.5 * 0.05));
  CHECK(p.mu() == doctest::Approx(1.0 - 0.5 * 1.5 * 0.05));
  DiffusionParams inv =
      params_from_rates(p.lambda(), p.mu(), 0.05,
                        static_cast<int>(std::round(3.0 / (0.05 * 0.05))));
  CHECK(inv.alpha == doctest::Approx(2.0));
  CHECK(inv.gamma == doctest::Approx(1.5));
  // Negative implied rate is rejected.
  CHECK_THROWS_AS(scale_params(1.0, 30.0, 1.0, 0.1), std::domain_error);
}

TEST_CASE("stationary density: normalization, vertex value, mode") {
  // Table-level pin: alpha = 2, sigma^2 = 100 -> w(0) eps = 0.0159577.
  DiffusionParams p = scale_params(2.0, 0.0, 50.0, 0.1);
  CHECK(stationary_density_w(0.0, p) * 0.1 ==
        doctest::Approx(0.0159577).epsilon(1e-5));
  // beta = 0: w(0) = 2 sqrt(alpha) / (sigma sqrt(pi)).
  CHECK(stationary_density_w(0.0, p) ==
        doctest::Approx(2.0 * std::sqrt(2.0) /
                        (10.0 * std::sqrt(std::numbers::pi))));
  for (double alpha : {0.5, 2.0})
    for (double sigma2 : {1.0, 100.0})
      for (double beta : {-2.0, 0.0, 3.0}) {
        double nu = sigma2 / alpha;
        double gamma = beta * alpha / nu;
        double eps = std::min(1e-3, 0.5 * alpha / (std::fabs(gamma) + 1.0));
        DiffusionParams dp = scale_params(alpha, gamma, nu, eps);
        CHECK(dp.beta() == doctest::Approx(beta));
        double s = std::sqrt(sigma2 / (2.0 * alpha));
        double hi = std::max(beta, 0.0) + 14.0 * s;
        double mass = num::integrate(
            [&](double x) { return stationary_density_w(x, dp); }, 0.0, hi,
            1e-13);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        // Mode at max(beta, 0).
        double mode = std::max(beta, 0.0);
        double wm = stationary_density_w(mode, dp);
        for (double dx : {0.05, 0.4, 1.1})
          CHECK(wm >= stationary_density_w(mode + dx, dp));
        if (mode > 0.0)
          CHECK(wm >= stationary_density_w(std::max(0.0, mode - 0.3), dp));
      }
}

TEST_CASE("ray densities carry the switching stationary vector") {
  DiffusionParams p = scale_params(2.0, 0.0, 1.0, 0.01);
  chain::SwitchMatrix uni = chain::example_switch_matrix(SwitchKind::Uniform, 4);
  CHECK(ray_density(1.0, 2, p, uni) ==
        doctest::Approx(stationary_density_w(1.0, p) / 4.0));
  chain::SwitchMatrix seq =
      chain::example_switch_matrix(SwitchKind::Sequential, 4);
  CHECK(ray_density(1.0, 1, p, seq) == doctest::Approx(0.0));
  CHECK(ray_density(1.0, 4, p, seq) ==
        doctest::Approx(stationary_density_w(1.0, p)));
  // Vertex probability balance for every scheme and ray.
  for (SwitchKind kind : {SwitchKind::Uniform, SwitchKind::UniformExcl,
                          SwitchKind::Cyclic, SwitchKind::RandomWalk}) {
    chain::SwitchMatrix C = chain::example_switch_matrix(kind, 4, 0.3);
    for (int j = 1; j <= 4; ++j) {
      double in = 0.0, out = 0.0;
      for (int l = 1; l <= 4; ++l) {
        if (l == j) continue;
        in += C.at(l, j) * ray_density(0.0, l, p, C);
        out += C.at(j, l) * ray_density(0.0, j, p, C);
      }
      CHECK(in == doctest::Approx(out).epsilon(1e-10));
    }
  }
}

TEST_CASE("moments of the position") {
  // beta = 0 closed values.
  DiffusionParams p0 = scale_params(2.0, 0.0, 50.0, 0.1);
  XMoments m0 = moments_X(p0);
  CHECK(m0.mean == doctest::Approx(10.0 / std::sqrt(2.0 * std::numbers::pi))
                       .epsilon(1e-14));
  CHECK(m0.mean == doctest::Approx(3.98942).epsilon(1e-5));
  CHECK(m0.variance ==
        doctest::Approx(25.0 * (1.0 - 2.0 / std::numbers::pi)).epsilon(1e-14));
  // Quadrature oracle across parameters.
  for (double beta : {-12.0, -1.5, 0.4, 2.0}) {
    double alpha = 1.3, sigma2 = 4.0;
    double nu = sigma2 / alpha;
    DiffusionParams dp = scale_params(alpha, beta * alpha / nu, nu, 1e-3);
    double s = std::sqrt(sigma2 / (2.0 * alpha));
    double hi = std::max(beta, 0.0) + 14.0 * s;
    double m1 = num::integrate(
        [&](double x) { return x * stationary_density_w(x, dp); }, 0.0, hi,
        1e-13);
    double m2 = num::integrate(
        [&](double x) { return x * x * stationary_density_w(x, dp); }, 0.0, hi,
        1e-13);
    XMoments m = moments_X(dp);
    CHECK(m.mean == doctest::Approx(m1).epsilon(1e-9));
    CHECK(m.variance == doctest::Approx(m2 - m1 * m1).epsilon(1e-9));
  }
  // Monotone in beta; the variance saturates at sigma^2/(2 alpha), so
  // the comparison allows roundoff once the increments vanish.
  double prev_mean = -1.0, prev_var = -1.0;
  for (int b = -10; b <= 10; ++b) {
    double alpha = 1.0, sigma2 = 2.0, nu = 2.0;
    DiffusionParams dp = scale_params(alpha, b * alpha / nu, nu, 1e-3);
    XMoments m = moments_X(dp);
    CHECK(m.mean > prev_mean);
    CHECK(m.variance >= prev_var - 1e-12);
    if (b <= 4) CHECK(m.variance > prev_var);
    prev_mean = m.mean;
    prev_var = m.variance;
  }
  {
    double alpha = 1.0, sigma2 = 2.0, nu = 2.0;
    XMoments far = moments_X(scale_params(alpha, 10.0 * alpha / nu, nu, 1e-3));
    CHECK(far.variance == doctest::Approx(sigma2 / (2.0 * alpha)).epsilon(1e-6));
    // Far-negative target: both moments head to 0 (the law concentrates
    // against the vertex; E ~ s^2/|beta| here).
    XMoments neg = moments_X(scale_params(alpha, -12.0 * alpha / nu, nu, 1e-3));
    XMoments mid = moments_X(scale_params(alpha, -6.0 * alpha / nu, nu, 1e-3));
    CHECK(neg.mean < mid.mean);
    CHECK(neg.variance < mid.variance);
    CHECK(neg.mean < 0.1);
    CHECK(neg.variance < 0.02);
  }
}

TEST_CASE("SDE guardrails and determinism") {
  DiffusionParams p = scale_params(2.0, 0.0, 1.0, 0.01);
  chain::SwitchMatrix C = chain::example_switch_matrix(SwitchKind::Uniform, 1);
  CHECK_THROWS_AS(
      simulate_spider_ou_path(p, C, 10.0, 0.3, {0.0, 1}, 1),
      std::domain_error);  // alpha dt = 0.6
  auto a = simulate_spider_ou_path(p, C, 1.0, 1e-3, {0.5, 1}, 7);
  auto b = simulate_spider_ou_path(p, C, 1.0, 1e-3, {0.5, 1}, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].ray == b[i].ray);
    CHECK(a[i].x >= 0.0);
  }
}

TEST_CASE("SDE stationary histogram approaches w") {
  // Quick version of the distributional check (the acceptance suite runs
  // the full-length one).
  DiffusionParams p = scale_params(10.0, 0.0, 2.0, 0.01);
  chain::SwitchMatrix C = chain::example_switch_matrix(SwitchKind::Uniform, 1);
  const int bins = 20;
  const double x_max = 4.0;
  std::vector<long> hist(bins, 0);
  long counted = 0, i = 0;
  const long steps = 2000000;
  simulate_spider_ou(p, C, steps * 1e-3, 1e-3, {0.5, 1}, 1234,
                     [&](double, const SpiderState& s, bool) {
                       if (++i <= steps / 10) return;
                       int b = static_cast<int>(s.x / x_max * bins);
                       if (b >= 0 && b < bins) {
                         ++hist[b];
                         ++counted;
                       }
                     });
  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    double lo = b * x_max / bins, hi = (b + 1) * x_max / bins;
    double pw = num::integrate(
        [&](double x) { return stationary_density_w(x, p); }, lo, hi, 1e-12);
    l1 += std::fabs(static_cast<double>(hist[b]) / counted - pw);
  }
  CHECK(l1 < 0.05);
}

TEST_CASE("SDE on sequential switching ends on the last ray") {
  DiffusionParams p = scale_params(10.0, 0.0, 2.0, 0.01);
  chain::SwitchMatrix C = chain::example_switch_matrix(SwitchKind::Sequential, 3);
  auto path = simulate_spider_ou_path(p, C, 50.0, 1e-3, {0.1, 1}, 99);
  CHECK(path.back().ray == 3);
}

TEST_CASE("Fokker-Planck evolution") {
  DiffusionParams p = scale_params(2.0, 0.0, 1.0, 0.01);  // sigma^2 = 2
  double s = std::sqrt(p.sigma2() / (2.0 * p.alpha));
  FpGrid grid{10.0 * s, 1500};
  const double dx = grid.x_max / grid.n_cells;

  SUBCASE("stationary input is a fixed point") {
    std::vector<double> w = w_on_grid(p, grid);
    for (double t : {0.5, 3.0}) {
      std::vector<double> h = fokker_planck_evolve(w, p, t, grid);
      double l1 = 0.0, mass = 0.0;
      for (int i = 0; i < grid.n_cells; ++i) {
        l1 += std::fabs(h[i] - w[i]) * dx;
        mass += h[i] * dx;
      }
      CHECK(l1 < 1e-6);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  SUBCASE("a narrow bump relaxes to w") {
    std::vector<double> h0(grid.n_cells, 0.0);
    int at = static_cast<int>(3.0 / dx);
    h0[at] = 1.0 / dx;
    std::vector<double> h = fokker_planck_evolve(h0, p, 10.0 / p.alpha, grid);
    std::vector<double> w = w_on_grid(p, grid);
    double l1 = 0.0, mass = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) {
      l1 += std::fabs(h[i] - w[i]) * dx;
      mass += h[i] * dx;
    }
    CHECK(l1 < 1e-3);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("guardrails") {
    std::vector<double> w = w_on_grid(p, grid);
    // User-supplied step above the advective bound.
    CHECK_THROWS_AS(fokker_planck_evolve(w, p, 1.0, grid, 1.0),
                    std::domain_error);
    // Domain too small for the far field.
    FpGrid tiny{2.0 * s, 200};
    std::vector<double> w2(200, 1.0 / tiny.x_max);
    CHECK_THROWS_AS(fokker_planck_evolve(w2, p, 1.0, tiny), std::domain_error);
  }
}
