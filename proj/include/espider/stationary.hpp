#ifndef ESPIDER_STATIONARY_HPP
#define ESPIDER_STATIONARY_HPP

#include "espider/signed_log.hpp"

#include <vector>

namespace espider::stat {

/// Signed log-space probability vector over levels.
using LogProbVector = std::vector<SignedLog>;

/// g(rho, N) = 1 / 2F1(-N, 1; 1+N; -rho). The reciprocal series has all
/// positive terms, so this is cancellation-free. Equals the stationary
/// empty-system probability rho(0).
SignedLog g(double rho, int N);

/// Stationary probability rho(k) = [g / C(2N,N)] rho^k C(2N, N+k),
/// computed entirely in log space (tails reach 1e-1203 at N = 1000).
SignedLog rho_k(int k, double rho, int N);

/// All of rho(0..N) as a LogProbVector.
LogProbVector stationary_log_probs(double rho, int N);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double cv = 0.0;
};

/// Asymptotic mean, variance and coefficient of variation:
///   E    = N (rho - 1 + g) / (1 + rho)
///   Var  = N [ rho (2 - g - g N) + N (1 - g) g ] / (1 + rho)^2
///   CV   = sqrt( rho (2 - g) / (N (rho-1+g)^2) - g / (rho-1+g) ).
Moments moments(double rho, int N);

/// Large-N elementary approximation of g, valid for rho < 1.
SignedLog g_approx(double rho, int N);

struct LargeNLimits {
  bool mean_diverges = false;
  bool var_diverges = false;
  double mean = 0.0;      // valid when !mean_diverges
  double variance = 0.0;  // valid when !var_diverges
  double cv = 0.0;        // always finite (0 when rho > 1)
};

/// N -> infinity behaviour of the stationary moments.
LargeNLimits limits_large_N(double rho);

/// Shannon entropy H = -sum rho(k) ln rho(k) in nats. Terms with
/// ln rho(k) < -745 (double underflow) contribute below 1e-320 and are
/// skipped.
double entropy(double rho, int N);

struct EntropyArgmax {
  double m = 0.0;                  // argmax over rho in (0.1, 20)
  double value = 0.0;              // H at the maximum
  std::vector<double> candidates;  // > 1 entry when the grid scan finds
                                   // several separated local maxima
};

EntropyArgmax entropy_argmax(int N);

struct ClassicalComparison {
  double c_const = 0.0;     // normalization c(lambda, N)
  double max_rel_err = 0.0; // worst |rho(k) c / (q_k + q_{-k}) - 1|
  bool holds = false;       // max_rel_err <= 1e-10
};

/// Relationship with the classical symmetric-rate model: with
/// q_k = C(2N, N-k) 2^{-2N}, verifies rho(k) = (q_k + q_{-k}) / c for
/// all k and rho(0) = 2 q_0 / c.
ClassicalComparison classical_comparison(int N);

struct StationarySummary {
  double rho = 1.0;
  int N = 1;
  LogProbVector probs;
  double mean = 0.0, variance = 0.0, cv = 0.0;
  double entropy = 0.0;
};

StationarySummary stationary_summary(double rho, int N);

}  // namespace espider::stat

#endif
