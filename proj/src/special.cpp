#include "espider/special.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace espider::special {

namespace mp = boost::multiprecision;

namespace {

// Lanczos g=7, 9 coefficients.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double ln_gamma_lanczos(double x) {
  // Valid for x >= 0.5.
  double a = kLanczos[0];
  double t = x + 6.5;  // g + 0.5 with g = 7
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i - 1.0);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t +
         std::log(a);
}

double ln_cpp_int(const mp::cpp_int& v) {
  // v > 0
  unsigned bits = static_cast<unsigned>(msb(v));
  if (bits <= 900) return std::log(v.convert_to<double>());
  mp::cpp_int shifted = v >> (bits - 512);
  return std::log(shifted.convert_to<double>()) +
         (bits - 512) * std::numbers::ln2;
}

SignedLog from_rational(const mp::cpp_rational& q) {
  if (q == 0) return SignedLog::zero();
  mp::cpp_int num = numerator(q), den = denominator(q);
  int sign = +1;
  if (num < 0) {
    sign = -1;
    num = -num;
  }
  return SignedLog::from_log(sign, ln_cpp_int(num) - ln_cpp_int(den));
}

/// Exact finite sum with rational term recurrence. a, b, c are converted
/// from doubles (exactly); requires the same termination structure as the
/// floating path.
SignedLog hyp2f1_rational(long a, double b, double c, double z, long n_terms) {
  mp::cpp_rational qa(a), qb(b), qc(c), qz(z);
  mp::cpp_rational term = 1, sum = 1;
  for (long n = 0; n + 1 <= n_terms; ++n) {
    mp::cpp_rational cn = qc + n;
    if (cn == 0) throw std::domain_error("hyp2f1: singular parameter (c)_n = 0");
    term *= (qa + n) * (qb + n) * qz / (cn * (n + 1));
    if (term == 0) break;
    sum += term;
  }
  return from_rational(sum);
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("ln_gamma: requires x > 0");
  if (x < 0.5) return ln_gamma_lanczos(x + 1.0) - std::log(x);
  return ln_gamma_lanczos(x);
}

double ln_binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error("ln_binomial: requires 0 <= k <= n");
  if (k == 0 || k == n) return 0.0;
  return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

SignedLog binomial_sl(long n, long k) {
  if (k < 0 || k > n) return SignedLog::zero();
  return SignedLog::from_log(+1, ln_binomial(n, k));
}

double erf(double x) {
  if (std::isnan(x)) return x;
  double ax = std::fabs(x);
  double sign = x < 0.0 ? -1.0 : 1.0;
  if (ax >= 6.0) return sign;  // 1 - erf(6) < 2.2e-17
  if (ax == 0.0) return x;
  // erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_n (2x^2)^n / (2n+1)!!.
  // All terms positive: stable for the whole range used here.
  double twox2 = 2.0 * ax * ax;
  double term = 1.0, sum = 1.0;
  for (int n = 1; n < 400; ++n) {
    term *= twox2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  double val = 2.0 * ax / std::sqrt(std::numbers::pi) * std::exp(-ax * ax) * sum;
  if (val > 1.0) val = 1.0;
  return sign * val;
}

double erfcx(double x) {
  if (!(x >= 0.0)) throw std::domain_error("erfcx: x >= 0 required");
  if (x < 2.5) return std::exp(x * x) * (1.0 - erf(x));
  // Continued fraction erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x +
  // (3/2)/(x + ...)))), evaluated by the modified Lentz scheme.
  const double tiny = 1e-300;
  double f = x, c = x, d = 0.0;
  for (int n = 1; n < 200; ++n) {
    double an = 0.5 * n;
    d = x + an * d;
    if (d == 0.0) d = tiny;
    c = x + an / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / (f * std::sqrt(std::numbers::pi));
}

SignedLog hyp2f1_terminating(long a, double b, double c, double z) {
  if (a > 0) throw std::domain_error("hyp2f1: a must be a non-positive integer");
  long n_terms = -a + 1;  // candidate count; may stop earlier on (b)_n = 0

  SignedLogSum acc;
  SignedLog term = SignedLog::one();
  acc.add_term(term);
  long n_used = n_terms;
  for (long n = 0; n + 1 < n_terms; ++n) {
    double cn = c + n;
    double an = static_cast<double>(a + n);
    double bn = b + n;
    if (bn == 0.0) {
      n_used = n + 1;
      break;  // series already terminated by the b parameter
    }
    if (cn == 0.0) throw std::domain_error("hyp2f1: singular parameter (c)_n = 0");
    SignedLog factor = SignedLog::from_double(an * bn * z / (cn * (n + 1)));
    term = mul(term, factor);
    acc.add_term(term);
    if (term.is_zero()) {
      n_used = n + 2;
      break;
    }
  }

  // The signed-log forward pass loses roughly (cancellation ratio) x
  // 1e-15 relative, so anything past a ratio of 1e2 goes to the exact
  // rational path to hold the 1e-12 contract.
  if (acc.log_cancellation() > std::log(1e2))
    return hyp2f1_rational(a, b, c, z, n_used);
  return acc.value();
}

}  // namespace espider::special
