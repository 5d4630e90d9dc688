#ifndef ESPIDER_SPECIAL_HPP
#define ESPIDER_SPECIAL_HPP

#include "espider/signed_log.hpp"

namespace espider::special {

/// ln Gamma(x) for x > 0 (Lanczos approximation, ~1e-14 relative).
double ln_gamma(double x);

/// ln C(n, k) for 0 <= k <= n.
double ln_binomial(long n, long k);

/// C(n, k) in signed-log form, with the usual convention C(n,k)=0 for
/// k < 0 or k > n. Formula code uses this; ln_binomial keeps the strict
/// domain contract.
SignedLog binomial_sl(long n, long k);

/// Error function, odd-exact: erf(-x) == -erf(x) bitwise.
double erf(double x);

/// Scaled complementary error function e^{x^2} erfc(x) for x >= 0
/// (continued fraction for large x). Keeps the stationary-density
/// normalization and moments finite for strongly negative drift targets,
/// where 1 + erf underflows.
double erfcx(double x);

/// Terminating Gauss hypergeometric 2F1(a, b; c; z) with a a non-positive
/// integer: the exact finite sum of |a|+1 terms (fewer when b is a
/// non-positive integer of smaller magnitude).
///
/// Summation runs forward in signed log space with the positive and
/// negative parts kept apart; if the terminal cancellation exceeds 1e6
/// the value is recomputed in exact rational arithmetic (every double is
/// a rational, so the fallback is total) and the rational result is
/// converted back to signed-log form.
///
/// Throws std::domain_error when a is not a non-positive integer, or a
/// Pochhammer (c)_n vanishes at a live term.
SignedLog hyp2f1_terminating(long a, double b, double c, double z);

}  // namespace espider::special

#endif
