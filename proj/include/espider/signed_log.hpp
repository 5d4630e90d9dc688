#ifndef ESPIDER_SIGNED_LOG_HPP
#define ESPIDER_SIGNED_LOG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace espider {

/// Signed log-space scalar: value = sign * exp(log_mag).
///
/// sign == 0 encodes an exact zero (log_mag is then -inf and must not be
/// read as a magnitude). Probability-scale quantities that can underflow
/// a double (stationary tails reach 1e-1203) are carried in this
/// representation end to end; conversion to a plain double happens only
/// at output boundaries.
struct SignedLog {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {+1, 0.0}; }

  static SignedLog from_double(double v) {
    if (v == 0.0) return zero();
    return {v > 0.0 ? +1 : -1, std::log(std::fabs(v))};
  }

  /// value = s * exp(ln_mag); s must be -1 or +1.
  static SignedLog from_log(int s, double ln_mag) {
    if (s == 0) return zero();
    return {s, ln_mag};
  }

  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_mag);
  }

  double log10_mag() const { return log_mag / std::numbers::ln10_v<double>; }

  bool is_zero() const { return sign == 0; }

  SignedLog operator-() const { return {-sign, log_mag}; }
};

inline SignedLog mul(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0 || b.sign == 0) return SignedLog::zero();
  return {a.sign * b.sign, a.log_mag + b.log_mag};
}

inline SignedLog div(const SignedLog& a, const SignedLog& b) {
  // b must be nonzero.
  return {a.sign * b.sign, a.log_mag - b.log_mag};
}

inline SignedLog scale(const SignedLog& a, double f) {
  return mul(a, SignedLog::from_double(f));
}

inline SignedLog add(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.sign == b.sign) {
    double hi = std::max(a.log_mag, b.log_mag);
    double lo = std::min(a.log_mag, b.log_mag);
    return {a.sign, hi + std::log1p(std::exp(lo - hi))};
  }
  if (a.log_mag == b.log_mag) return SignedLog::zero();
  const SignedLog& big = (a.log_mag > b.log_mag) ? a : b;
  const SignedLog& small = (a.log_mag > b.log_mag) ? b : a;
  double d = small.log_mag - big.log_mag;  // < 0
  return {big.sign, big.log_mag + std::log1p(-std::exp(d))};
}

inline SignedLog sub(const SignedLog& a, const SignedLog& b) { return add(a, -b); }

/// |a| <=> |b|
inline int cmp_mag(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0 && b.sign == 0) return 0;
  if (a.sign == 0) return -1;
  if (b.sign == 0) return +1;
  if (a.log_mag < b.log_mag) return -1;
  if (a.log_mag > b.log_mag) return +1;
  return 0;
}

/// Streaming accumulator for sums of SignedLog terms. Positive and
/// negative contributions are accumulated separately so the final
/// cancellation ratio is observable by the caller.
class SignedLogSum {
 public:
  void add_term(const SignedLog& t) {
    if (t.sign == 0) return;
    if (t.sign > 0)
      accumulate(pos_max_, pos_sum_, t.log_mag);
    else
      accumulate(neg_max_, neg_sum_, t.log_mag);
  }

  SignedLog positive_part() const { return part(pos_max_, pos_sum_); }
  SignedLog negative_part() const { return part(neg_max_, neg_sum_); }

  SignedLog value() const { return sub(positive_part(), negative_part()); }

  /// log of (|P| + |N|) / |P - N|; 0 when no cancellation, +inf when the
  /// sum is an exact zero of nonzero parts.
  double log_cancellation() const {
    SignedLog tot = add(positive_part(), negative_part());
    SignedLog v = value();
    if (tot.sign == 0) return 0.0;
    if (v.sign == 0) return std::numeric_limits<double>::infinity();
    return tot.log_mag - v.log_mag;
  }

 private:
  static void accumulate(double& mx, double& s, double lg) {
    if (s == 0.0) {
      mx = lg;
      s = 1.0;
      return;
    }
    if (lg > mx) {
      s = s * std::exp(mx - lg) + 1.0;
      mx = lg;
    } else {
      s += std::exp(lg - mx);
    }
  }

  static SignedLog part(double mx, double s) {
    if (s == 0.0) return SignedLog::zero();
    return {+1, mx + std::log(s)};
  }

  double pos_max_ = 0.0, pos_sum_ = 0.0;
  double neg_max_ = 0.0, neg_sum_ = 0.0;
};

}  // namespace espider

#endif
