#include "espider/stationary.hpp"

#include "espider/numeric.hpp"
#include "espider/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace espider::stat {

using special::ln_binomial;
using special::ln_gamma;

namespace {

/// ln 2F1(-N, 1; 1+N; -rho) via the positive series
/// sum_n (N!)^2 / ((N-n)! (N+n)!) rho^n.
double ln_hyp_recip_g(double rho, int N) {
  double lnrho = std::log(rho);
  double ln_nfact = ln_gamma(N + 1.0);
  double mx = 0.0, s = 0.0;
  for (int n = 0; n <= N; ++n) {
    double lt = 2.0 * ln_nfact - ln_gamma(N - n + 1.0) - ln_gamma(N + n + 1.0) +
                n * lnrho;
    if (s == 0.0) {
      mx = lt;
      s = 1.0;
    } else if (lt > mx) {
      s = s * std::exp(mx - lt) + 1.0;
      mx = lt;
    } else {
      s += std::exp(lt - mx);
    }
  }
  return mx + std::log(s);
}

}  // namespace

SignedLog g(double rho, int N) {
  if (!(rho > 0.0)) throw std::domain_error("g: rho > 0 required");
  if (N < 1) throw std::domain_error("g: N >= 1 required");
  return SignedLog::from_log(+1, -ln_hyp_recip_g(rho, N));
}

SignedLog rho_k(int k, double rho, int N) {
  if (k < 0 || k > N) throw std::domain_error("rho_k: 0 <= k <= N required");
  // The binomial offset is grouped first so rho(0) == g holds bitwise.
  double ln = g(rho, N).log_mag +
              (k * std::log(rho) +
               (ln_binomial(2L * N, N + k) - ln_binomial(2L * N, N)));
  return SignedLog::from_log(+1, ln);
}

LogProbVector stationary_log_probs(double rho, int N) {
  LogProbVector v(N + 1);
  double lng = g(rho, N).log_mag;
  double lnC = ln_binomial(2L * N, N);
  double lnrho = std::log(rho);
  for (int k = 0; k <= N; ++k)
    v[k] = SignedLog::from_log(
        +1, lng + (k * lnrho + (ln_binomial(2L * N, N + k) - lnC)));
  return v;
}

Moments moments(double rho, int N) {
  double gg = g(rho, N).to_double();
  Moments m;
  m.mean = N * (rho - 1.0 + gg) / (1.0 + rho);
  m.variance = N *
               (rho * (2.0 - gg - gg * N) + N * (1.0 - gg) * gg) /
               ((1.0 + rho) * (1.0 + rho));
  if (!(m.mean > 0.0))
    throw std::runtime_error("moments: mean must be positive for rho>0, N>=1");
  double inner = rho * (2.0 - gg) / (N * (rho - 1.0 + gg) * (rho - 1.0 + gg)) -
                 gg / (rho - 1.0 + gg);
  m.cv = std::sqrt(inner);
  return m;
}

SignedLog g_approx(double rho, int N) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("g_approx: derived only for 0 < rho < 1");
  if (N < 1) throw std::domain_error("g_approx: N >= 1 required");
  double L = std::log((rho + 1.0) * (rho + 1.0) / (4.0 * rho));
  double L52 = std::pow(L, 2.5);
  double cube = (rho - 1.0) * (rho - 1.0) * (rho - 1.0);  // < 0 here
  // Numerator: 2^{3-2N} (2N)! sqrt(pi) N^{5/2} (rho-1)^3 L^{5/2}.
  SignedLog num = SignedLog::from_log(
      cube < 0 ? -1 : +1,
      (3.0 - 2.0 * N) * std::numbers::ln2 + ln_gamma(2.0 * N + 1.0) +
          0.5 * std::log(std::numbers::pi) + 2.5 * std::log((double)N) +
          std::log(std::fabs(cube)) + std::log(L52));
  // Denominator: (N!)^2 [ 3 (rho-1)^3
  //              + N L^{5/2} ((3 rho+1)^2 - 8 N (rho-1)^2) ].
  double bracket = 3.0 * cube +
                   N * L52 * ((3.0 * rho + 1.0) * (3.0 * rho + 1.0) -
                              8.0 * N * (rho - 1.0) * (rho - 1.0));
  SignedLog den = SignedLog::from_log(
      bracket < 0 ? -1 : +1,
      2.0 * ln_gamma(N + 1.0) + std::log(std::fabs(bracket)));
  return div(num, den);
}

LargeNLimits limits_large_N(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("limits_large_N: rho > 0 required");
  LargeNLimits out;
  if (rho > 1.0) {
    out.mean_diverges = true;
    out.var_diverges = true;
    out.cv = 0.0;
    return out;
  }
  if (rho == 1.0) {
    out.mean_diverges = true;
    out.var_diverges = true;
    out.cv = std::sqrt(std::numbers::pi / 2.0 - 1.0);
    return out;
  }
  double L = std::log((1.0 + rho) * (1.0 + rho) / (4.0 * rho));
  double L52 = std::pow(L, 2.5);
  double poly = 145.0 * std::pow(rho, 4) + 492.0 * std::pow(rho, 3) +
                374.0 * rho * rho + 12.0 * rho + 1.0;
  out.mean = rho / (1.0 - rho);
  out.variance = 3.0 * std::pow(1.0 - rho, 3) /
                     (8.0 * (1.0 + rho) * (1.0 + rho) * L52) -
                 poly / (128.0 * std::pow(1.0 - rho * rho, 2));
  out.cv = std::sqrt(24.0 * std::pow(1.0 - rho, 5) / L52 - poly / 2.0) /
           (8.0 * rho * (1.0 + rho));
  return out;
}

double entropy(double rho, int N) {
  LogProbVector probs = stationary_log_probs(rho, N);
  num::KahanSum h;
  for (const SignedLog& p : probs) {
    if (p.sign == 0 || p.log_mag < -745.0) continue;
    h.add(-std::exp(p.log_mag) * p.log_mag);
  }
  return h.value();
}

EntropyArgmax entropy_argmax(int N) {
  if (N < 1) throw std::domain_error("entropy_argmax: N >= 1 required");
  const double lo = 0.1, hi = 20.0;
  auto H = [&](double rho) { return entropy(rho, N); };
  // Grid scan for unimodality: collect interior local maxima.
  const int grid = 400;
  std::vector<double> xs(grid), hs(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid - 1.0);
    hs[i] = H(xs[i]);
  }
  EntropyArgmax out;
  for (int i = 1; i + 1 < grid; ++i)
    if (hs[i] > hs[i - 1] && hs[i] >= hs[i + 1]) {
      num::GoldenResult r = num::golden_max(H, xs[i - 1], xs[i + 1], 1e-4);
      // Merge refinements that landed on the same peak.
      bool dup = false;
      for (double c : out.candidates)
        if (std::fabs(c - r.x) < 1e-3) dup = true;
      if (!dup) out.candidates.push_back(r.x);
    }
  if (out.candidates.empty()) {
    num::GoldenResult r = num::golden_max(H, lo, hi, 1e-4);
    out.candidates.push_back(r.x);
  }
  double best = -1.0;
  for (double c : out.candidates) {
    double v = H(c);
    if (v > best) {
      best = v;
      out.m = c;
    }
  }
  out.value = best;
  return out;
}

ClassicalComparison classical_comparison(int N) {
  if (N < 1) throw std::domain_error("classical_comparison: N >= 1 required");
  // c = 4^{-N} { 2 C(2N,N) + [C(2N,N-1) + C(2N,N+1)] 2F1(1, 1-N; N+2; -1) }.
  SignedLog f = special::hyp2f1_terminating(1L - N, 1.0, N + 2.0, -1.0);
  SignedLog sum = add(
      SignedLog::from_log(+1, std::numbers::ln2 + ln_binomial(2L * N, N)),
      mul(add(special::binomial_sl(2 * N, N - 1),
              special::binomial_sl(2 * N, N + 1)),
          f));
  SignedLog c = mul(sum, SignedLog::from_log(+1, -N * std::log(4.0)));

  ClassicalComparison out;
  out.c_const = c.to_double();
  double ln4N = N * std::log(4.0);
  for (int k = 0; k <= N; ++k) {
    // q_k + q_{-k} = 2 C(2N, N-k) 2^{-2N} (the law is symmetric in k).
    double ln_qsum =
        std::numbers::ln2 + ln_binomial(2L * N, N - k) - ln4N;
    SignedLog lhs = mul(rho_k(k, 1.0, N), c);
    double rel = std::fabs(std::expm1(lhs.log_mag - ln_qsum));
    out.max_rel_err = std::max(out.max_rel_err, rel);
  }
  out.holds = out.max_rel_err <= 1e-10;
  return out;
}

StationarySummary stationary_summary(double rho, int N) {
  StationarySummary s;
  s.rho = rho;
  s.N = N;
  s.probs = stationary_log_probs(rho, N);
  Moments m = moments(rho, N);
  s.mean = m.mean;
  s.variance = m.variance;
  s.cv = m.cv;
  s.entropy = entropy(rho, N);
  return s;
}

}  // namespace espider::stat
