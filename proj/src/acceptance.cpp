#include "espider/acceptance.hpp"

#include "espider/compare.hpp"
#include "espider/diffusion.hpp"
#include "espider/model.hpp"
#include "espider/montecarlo.hpp"
#include "espider/numeric.hpp"
#include "espider/rng.hpp"
#include "espider/special.hpp"
#include "espider/stationary.hpp"
#include "espider/transient.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace espider::accept {

namespace {

using chain::ChainState;
using chain::ModelParams;
using chain::SwitchKind;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ModelParams make_params(double lambda, double mu, int N, int d,
                        SwitchKind kind, double p = 0.5) {
  ModelParams mp;
  mp.lambda = lambda;
  mp.mu = mu;
  mp.capacity = N;
  mp.rays = d;
  mp.switching = chain::example_switch_matrix(kind, d, p);
  return mp;
}

CriterionResult criterion_1() {
  CriterionResult r;
  r.id = 1;
  r.name = "stationary table: exact and large-N approximation";
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  cmp::TableCheck tc = cmp::check_table1(log, 6);
  double secs = seconds_since(t0);
  // As stated this criterion includes the source table's N=100
  // approximation column, which provably does not follow the displayed
  // large-N formula (the same code reproduces every N=500/1000 cell);
  // those values fail and are reported rather than excluded.
  bool ok = tc.all_ok();
  std::ostringstream d;
  d << tc.checked << " consistent values: " << (tc.checked - tc.missed)
    << " match; " << tc.known_bad
    << " N=100 approximation values known inconsistent with the displayed "
       "formula, "
    << tc.known_bad_missed << " fail as expected (see decisions ledger); "
    << secs << " s";
  if (tc.missed > 0) d << "; " << log.str();
  if (secs >= 5.0) {
    ok = false;
    d << " (over 5 s budget)";
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_2() {
  CriterionResult r;
  r.id = 2;
  r.name = "diffusion-vs-chain stationary table";
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  bool ok = cmp::check_table3(log, 6).all_ok();
  // Pin the headline relative difference at N = 5000, k = 0.
  auto rows = cmp::table3({5000}, 0.1, 1.0, {0});
  double delta0 = rows.front().delta;
  if (std::fabs(delta0 - 0.00800385) > 5e-9) ok = false;
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << cmp::table3_preset().size() << " cells x3 values, Delta(0)=" << delta0
    << ", " << secs << " s";
  if (!ok) d << "; " << log.str();
  if (secs >= 5.0) {
    ok = false;
    d << " (over 5 s budget)";
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_3() {
  CriterionResult r;
  r.id = 3;
  r.name = "entropy maximizer over the rate ratio";
  auto t0 = std::chrono::steady_clock::now();
  const int ns[] = {2, 4, 6, 8, 10, 15, 20, 30};
  const double ms[] = {2.45, 2.69, 2.66, 2.57, 2.47, 2.28, 2.14, 1.95};
  bool ok = true;
  std::ostringstream d;
  for (int i = 0; i < 8; ++i) {
    stat::EntropyArgmax am = stat::entropy_argmax(ns[i]);
    bool cell = std::fabs(am.m - ms[i]) <= 0.01 && am.candidates.size() == 1;
    if (!cell) ok = false;
    d << "N=" << ns[i] << ": " << am.m << (cell ? " " : " MISS ");
  }
  double secs = seconds_since(t0);
  d << "(" << secs << " s)";
  if (secs >= 30.0) ok = false;
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_4() {
  CriterionResult r;
  r.id = 4;
  r.name = "closed-form transient vs uniformization oracle";
  bool ok = true;
  double worst = 0.0, worst_p00 = 0.0;
  for (int N = 1; N <= 6; ++N) {
    for (double mu : {0.5, 1.0, 2.0}) {
      transient::SpectralDecomposition sd =
          transient::spectral_decomposition(N, mu);
      // p(0,0) = 1 certifies the weight normalization convention.
      double p00 = transient::p0_closed(0.0, sd);
      worst_p00 = std::max(worst_p00, std::fabs(p00 - 1.0));
      ModelParams mp = make_params(mu, mu, N, 1, SwitchKind::Uniform);
      for (double t : {0.1, 0.5, 1.0, 3.0}) {
        transient::TransientSolution sol =
            transient::transient_oracle(mp, t, ChainState::origin(1));
        double err = std::fabs(transient::p0_closed(t, sd) - sol.level_probs[0]);
        for (int k = 1; k <= N; ++k)
          err = std::max(err, std::fabs(transient::pr_closed(k, t, sd) -
                                        sol.level_probs[k]));
        worst = std::max(worst, err);
      }
    }
  }
  if (worst >= 1e-7 || worst_p00 > 1e-12) ok = false;
  std::ostringstream d;
  d << "max |closed - oracle| = " << worst << ", |p(0,0)-1| = " << worst_p00;
  r.pass = ok;
  r.detail = d.str();
  return r;
}

double laplace_quadrature(const ModelParams& mp, double eta) {
  const double T = 40.0;
  double tail_level = stat::g(mp.rho(), mp.capacity).to_double();
  double integral;
  if (std::fabs(mp.lambda - mp.mu) <= 1e-12 * (mp.lambda + mp.mu)) {
    transient::SpectralDecomposition sd =
        transient::spectral_decomposition(mp.capacity, mp.mu);
    integral = num::integrate(
        [&](double t) { return std::exp(-eta * t) * transient::p0_closed(t, sd); },
        0.0, T, 1e-10);
  } else {
    num::CubicSpline p0 = transient::p0_oracle_spline(mp, T, 500);
    integral = num::integrate(
        [&](double t) { return std::exp(-eta * t) * p0(t); }, 0.0, T, 1e-10);
  }
  return integral + tail_level * std::exp(-eta * T) / eta;
}

CriterionResult criterion_5() {
  CriterionResult r;
  r.id = 5;
  r.name = "Laplace transform consistency and Tauberian limit";
  bool ok = true;
  double worst_quad = 0.0, worst_taub = 0.0;
  for (int N = 1; N <= 5; ++N) {
    ModelParams mp = make_params(1.0, 1.0, N, 1, SwitchKind::Uniform);
    for (double eta : {0.5, 1.0, 2.0}) {
      double err =
          std::fabs(transient::laplace_H(eta, mp) - laplace_quadrature(mp, eta));
      worst_quad = std::max(worst_quad, err);
    }
    double taub = std::fabs(1e-7 * transient::laplace_H(1e-7, mp) -
                            stat::g(1.0, N).to_double());
    worst_taub = std::max(worst_taub, taub);
  }
  {
    ModelParams mp = make_params(2.0, 1.0, 3, 1, SwitchKind::Uniform);
    for (double eta : {0.5, 1.0, 2.0}) {
      double err =
          std::fabs(transient::laplace_H(eta, mp) - laplace_quadrature(mp, eta));
      worst_quad = std::max(worst_quad, err);
    }
    double taub = std::fabs(1e-7 * transient::laplace_H(1e-7, mp) -
                            stat::g(2.0, 3).to_double());
    worst_taub = std::max(worst_taub, taub);
  }
  if (worst_quad >= 1e-6 || worst_taub >= 1e-5) ok = false;
  std::ostringstream d;
  d << "max |H - quadrature| = " << worst_quad
    << ", max Tauberian gap = " << worst_taub;
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_6() {
  CriterionResult r;
  r.id = 6;
  r.name = "generator null space vs closed-form stationary law";
  bool ok = true;
  double worst_gen = 0.0, worst_norm = 0.0, worst_classical = 0.0;
  bool rho0_exact = true;
  const SwitchKind kinds[] = {SwitchKind::Uniform, SwitchKind::UniformExcl,
                              SwitchKind::Cyclic, SwitchKind::Sequential,
                              SwitchKind::RandomWalk};
  const std::pair<double, double> rates[] = {{1.0, 1.0}, {2.0, 1.0}, {0.5, 1.3}};
  for (int N = 1; N <= 8; ++N) {
    for (auto [lambda, mu] : rates) {
      double rho = lambda / mu;
      stat::LogProbVector probs = stat::stationary_log_probs(rho, N);
      double norm = 0.0;
      for (const SignedLog& v : probs) norm += v.to_double();
      worst_norm = std::max(worst_norm, std::fabs(norm - 1.0));
      if (stat::rho_k(0, rho, N).log_mag != stat::g(rho, N).log_mag)
        rho0_exact = false;
      for (int d = 2; d <= 4; ++d) {
        for (SwitchKind kind : kinds) {
          ModelParams mp = make_params(lambda, mu, N, d, kind, 0.4);
          std::vector<double> levels = chain::generator_stationary_levels(mp);
          for (int k = 0; k <= N; ++k)
            worst_gen = std::max(
                worst_gen, std::fabs(levels[k] - probs[k].to_double()));
        }
      }
    }
  }
  for (int N = 1; N <= 30; ++N) {
    stat::ClassicalComparison cc = stat::classical_comparison(N);
    worst_classical = std::max(worst_classical, cc.max_rel_err);
  }
  if (worst_gen > 1e-10 || worst_norm > 1e-10 || !rho0_exact ||
      worst_classical > 1e-10)
    ok = false;
  std::ostringstream d;
  d << "max |null-space - rho(k)| = " << worst_gen << ", |sum-1| = "
    << worst_norm << ", rho(0)==g " << (rho0_exact ? "exact" : "BROKEN")
    << ", classical identity err = " << worst_classical;
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_7() {
  CriterionResult r;
  r.id = 7;
  r.name = "Monte Carlo coverage at closed-form targets";
  auto t0 = std::chrono::steady_clock::now();
  const int campaigns = 200;
  const long runs = 10000;
  long covered = 0, cells = 0;

  // Symmetric-rate case against the transient closed forms.
  {
    ModelParams mp = make_params(1.0, 1.0, 3, 2, SwitchKind::Uniform);
    std::vector<double> times = {1.0, 2.0, 5.0};
    std::vector<std::vector<double>> truth;
    for (double t : times)
      truth.push_back(transient::closed_level_distribution(t, 3, 1.0));
    for (int c = 0; c < campaigns; ++c) {
      auto tables = mc::estimate_pk_multi(mp, times, runs,
                                          1000003ULL * (c + 1),
                                          ChainState::origin(1));
      for (std::size_t ti = 0; ti < tables.size(); ++ti)
        for (int k = 0; k <= 3; ++k) {
          ++cells;
          if (truth[ti][k] >= tables[ti].ci_low[k] &&
              truth[ti][k] <= tables[ti].ci_high[k])
            ++covered;
        }
    }
  }
  // Asymmetric rates against the stationary law (t past relaxation).
  {
    ModelParams mp = make_params(2.0, 1.0, 3, 2, SwitchKind::Uniform);
    std::vector<double> times = {20.0};
    std::vector<double> truth(4);
    for (int k = 0; k <= 3; ++k) truth[k] = stat::rho_k(k, 2.0, 3).to_double();
    for (int c = 0; c < campaigns; ++c) {
      auto tables = mc::estimate_pk_multi(mp, times, runs,
                                          2000003ULL * (c + 1),
                                          ChainState::origin(1));
      for (int k = 0; k <= 3; ++k) {
        ++cells;
        if (truth[k] >= tables[0].ci_low[k] && truth[k] <= tables[0].ci_high[k])
          ++covered;
      }
    }
  }
  double secs = seconds_since(t0);
  double fraction = static_cast<double>(covered) / cells;
  bool ok = fraction >= 0.93 && secs < 120.0;
  std::ostringstream d;
  d << "coverage " << covered << "/" << cells << " = " << fraction << " ("
    << secs << " s)";
  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_8() {
  CriterionResult r;
  r.id = 8;
  r.name = "diffusion stationary law, Fokker-Planck and SDE";
  bool ok = true;
  std::ostringstream d;

  // Closed-form density: normalization and moments across a parameter grid.
  double worst_mass = 0.0, worst_mom = 0.0;
  for (double alpha : {0.5, 2.0})
    for (double sigma2 : {1.0, 100.0})
      for (double beta : {-2.0, 0.0, 3.0}) {
        double nu = sigma2 / alpha;
        double gamma = beta * alpha / nu;
        double eps = 1e-3;
        if (std::fabs(gamma) * eps >= alpha) eps = 0.5 * alpha / std::fabs(gamma);
        diff::DiffusionParams dp = diff::scale_params(alpha, gamma, nu, eps);
        double s = std::sqrt(sigma2 / (2.0 * alpha));
        double hi = std::max(beta, 0.0) + 14.0 * s;
        double mass = num::integrate(
            [&](double x) { return diff::stationary_density_w(x, dp); }, 0.0,
            hi, 1e-13);
        worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
        double m1 = num::integrate(
            [&](double x) { return x * diff::stationary_density_w(x, dp); },
            0.0, hi, 1e-13);
        double m2 = num::integrate(
            [&](double x) { return x * x * diff::stationary_density_w(x, dp); },
            0.0, hi, 1e-13);
        diff::XMoments xm = diff::moments_X(dp);
        worst_mom = std::max(worst_mom, std::fabs(xm.mean - m1));
        worst_mom = std::max(worst_mom,
                             std::fabs(xm.variance - (m2 - m1 * m1)));
      }
  if (worst_mass > 1e-10 || worst_mom > 1e-9) ok = false;
  d << "mass err " << worst_mass << ", moment err " << worst_mom;

  // beta = 0 closed values.
  {
    diff::DiffusionParams dp = diff::scale_params(2.0, 0.0, 50.0, 0.1);
    diff::XMoments xm = diff::moments_X(dp);
    double expect = std::sqrt(dp.sigma2()) /
                    std::sqrt(std::numbers::pi * dp.alpha);
    if (std::fabs(xm.mean - expect) > 1e-12) {
      ok = false;
      d << "; beta=0 mean MISS";
    }
  }

  // Fokker-Planck relaxation to the stationary density.
  {
    diff::DiffusionParams dp = diff::scale_params(2.0, 0.0, 50.0, 0.1);
    diff::FpGrid grid{50.0, 2000};
    std::vector<double> h0(grid.n_cells, 1.0 / grid.x_max);
    std::vector<double> h =
        diff::fokker_planck_evolve(h0, dp, 12.0 / dp.alpha, grid);
    std::vector<double> w = diff::w_on_grid(dp, grid);
    double dx = grid.x_max / grid.n_cells, l1 = 0.0, mass = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) {
      l1 += std::fabs(h[i] - w[i]) * dx;
      mass += h[i] * dx;
    }
    d << "; FP L1 " << l1 << " mass err " << std::fabs(mass - 1.0);
    if (l1 > 1e-3 || std::fabs(mass - 1.0) > 1e-8) ok = false;
  }

  // SDE histogram vs w (single ray, beta = 0).
  {
    diff::DiffusionParams dp = diff::scale_params(10.0, 0.0, 2.0, 0.01);
    chain::SwitchMatrix C = chain::example_switch_matrix(SwitchKind::Uniform, 1);
    const double dt = 1e-3;
    const long steps = 10000000;
    const int bins = 25;
    const double x_max = 5.0;  // 5 stationary standard deviations
    std::vector<long> hist(bins, 0);
    long counted = 0, i = 0;
    diff::simulate_spider_ou(
        dp, C, steps * dt, dt, {0.5, 1}, 424242,
        [&](double, const diff::SpiderState& s, bool) {
          if (++i <= steps / 10) return;  // burn-in
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
          [&](double x) { return diff::stationary_density_w(x, dp); }, lo, hi,
          1e-12);
      l1 += std::fabs(static_cast<double>(hist[b]) / counted - pw);
    }
    d << "; SDE hist L1 " << l1;
    if (l1 > 0.02) ok = false;
  }

  // SDE ray occupancy and empirical switching matrix, all five schemes.
  {
    const SwitchKind kinds[] = {SwitchKind::Uniform, SwitchKind::UniformExcl,
                                SwitchKind::Cyclic, SwitchKind::Sequential,
                                SwitchKind::RandomWalk};
    diff::DiffusionParams dp = diff::scale_params(10.0, 0.0, 2.0, 0.01);
    double worst_z = 0.0;
    bool switch_ok = true;
    for (SwitchKind kind : kinds) {
      const int dray = 4;
      chain::SwitchMatrix C = chain::example_switch_matrix(kind, dray, 0.3);
      std::vector<double> pi = chain::switch_stationary(C);
      const int replicas = 24;
      const long steps = 200000;
      const double dt = 1e-3;
      std::vector<std::vector<double>> occ(replicas,
                                           std::vector<double>(dray, 0.0));
      std::vector<std::vector<long>> contacts(dray, std::vector<long>(dray, 0));
      for (int rep = 0; rep < replicas; ++rep) {
        long count = 0, i = 0;
        int prev_ray = 1 + rep % dray;
        diff::simulate_spider_ou(
            dp, C, steps * dt, dt, {0.5, prev_ray},
            77000 + 131 * rep + static_cast<int>(kind),
            [&](double, const diff::SpiderState& s, bool contact) {
              if (contact) {
                ++contacts[prev_ray - 1][s.ray - 1];
                prev_ray = s.ray;
              }
              if (++i <= steps / 2) return;
              ++count;
              occ[rep][s.ray - 1] += 1.0;
            });
        for (int j = 0; j < dray; ++j) occ[rep][j] /= count;
      }
      // Replica-mean occupancy vs pi with a 3-sigma band from the
      // replica spread (replicas are independent).
      for (int j = 0; j < dray; ++j) {
        double mean = 0.0;
        for (int rep = 0; rep < replicas; ++rep) mean += occ[rep][j];
        mean /= replicas;
        double var = 0.0;
        for (int rep = 0; rep < replicas; ++rep)
          var += (occ[rep][j] - mean) * (occ[rep][j] - mean);
        var /= (replicas - 1.0);
        double se = std::sqrt(var / replicas);
        double z = std::fabs(mean - pi[j]) / std::max(se, 1e-3);
        worst_z = std::max(worst_z, z);
      }
      // Vertex contacts are independent draws from the rows of C.
      for (int l = 0; l < dray; ++l) {
        long n = 0;
        for (int j = 0; j < dray; ++j) n += contacts[l][j];
        if (n < 50) continue;
        for (int j = 0; j < dray; ++j) {
          double pc = C.at(l + 1, j + 1);
          double phat = static_cast<double>(contacts[l][j]) / n;
          double band = 3.0 * std::sqrt(pc * (1.0 - pc) / n) + 1.5 / n;
          if (std::fabs(phat - pc) > band) switch_ok = false;
        }
      }
    }
    d << "; ray occupancy worst z " << worst_z << ", switch matrix "
      << (switch_ok ? "ok" : "MISS");
    if (worst_z > 3.0 || !switch_ok) ok = false;
  }

  r.pass = ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_9() {
  CriterionResult r;
  r.id = 9;
  r.name = "large-N limits of the stationary moments";
  stat::Moments m = stat::moments(0.5, 2000);
  stat::LargeNLimits lim = stat::limits_large_N(0.5);
  double mean_err = std::fabs(m.mean - lim.mean);
  double var_rel = std::fabs(m.variance / lim.variance - 1.0);
  stat::Moments m1 = stat::moments(1.0, 2000);
  double cv_err = std::fabs(m1.cv - std::sqrt(std::numbers::pi / 2.0 - 1.0));
  // As stated: N = 2000 with tolerances 1e-3 / 1% / 1e-3. The exact
  // moments do converge to these limits, but at rate 1/N (mean,
  // variance) and 1/sqrt(N) (cv at rho = 1), so the stated tolerances
  // first hold near N ~ 1e4, 2.3e3 and 3e6 respectively; at N = 2000
  // they cannot hold (see decisions ledger). The convergence itself is
  // verified here at the measured rates.
  bool stated_ok = mean_err < 1e-3 && var_rel < 0.01 && cv_err < 1e-3;
  stat::Moments m4 = stat::moments(0.5, 8000);
  stat::Moments m14 = stat::moments(1.0, 8000);
  double mean_err4 = std::fabs(m4.mean - lim.mean);
  double var_rel4 = std::fabs(m4.variance / lim.variance - 1.0);
  double cv_err4 = std::fabs(m14.cv - std::sqrt(std::numbers::pi / 2.0 - 1.0));
  bool rates_ok = mean_err < 5.5e-3 && var_rel < 1.2e-2 && cv_err < 1.4e-2 &&
                  mean_err4 / mean_err < 0.30 && var_rel4 / var_rel < 0.30 &&
                  cv_err4 / cv_err < 0.55;
  std::ostringstream d;
  d << "|mean-1| = " << mean_err << " (x" << mean_err4 / mean_err
    << " at 4N), var rel err = " << var_rel << " (x" << var_rel4 / var_rel
    << "), cv err = " << cv_err << " (x" << cv_err4 / cv_err
    << "); convergence at the expected rates "
    << (rates_ok ? "verified" : "BROKEN") << "; stated N=2000 tolerances "
    << (stated_ok ? "hold" : "unattainable (spec defect, see ledger)");
  r.pass = stated_ok;
  r.detail = d.str();
  return r;
}

CriterionResult criterion_10() {
  CriterionResult r;
  r.id = 10;
  r.name = "moment agreement under the diffusion scaling";
  cmp::MomentAgreementReport rep = cmp::moment_agreement(10000, 0.1);
  bool ok = std::fabs(rep.mean_ratio - 1.0) < 0.01 &&
            std::fabs(rep.var_ratio - 1.0) < 0.01;
  std::ostringstream d;
  d << "mean ratio " << rep.mean_ratio << ", var ratio " << rep.var_ratio;
  r.pass = ok;
  r.detail = d.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_criteria() {
  return {criterion_1(), criterion_2(), criterion_3(), criterion_4(),
          criterion_5(), criterion_6(), criterion_7(), criterion_8(),
          criterion_9(), criterion_10()};
}

int run_all(std::ostream& os) {
  int failures = 0;
  for (const CriterionResult& r : run_criteria()) {
    os << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": "
       << r.name << " -- " << r.detail << "\n";
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace espider::accept
