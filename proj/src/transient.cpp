#include "espider/transient.hpp"

#include "espider/special.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace espider::transient {

namespace {

// ---------------------------------------------------------------------
// Uniformization oracle
// ---------------------------------------------------------------------

void uniformization_advance(const chain::Generator& g, double rate,
                            std::vector<double>& v, double dt) {
  if (dt <= 0.0) return;
  const double a = rate * dt;  // kept <= 500 by the caller
  double w = std::exp(-a);
  double cum = w;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = w * v[i];
  std::vector<double> vk = v, qv;
  const int m_cap = static_cast<int>(a + 60.0 * std::sqrt(a + 1.0)) + 80;
  for (int m = 1; cum < 1.0 - 1e-15 && m <= m_cap; ++m) {
    g.mul_left(vk, qv);
    for (std::size_t i = 0; i < vk.size(); ++i) vk[i] += qv[i] / rate;
    w *= a / m;
    cum += w;
    for (std::size_t i = 0; i < vk.size(); ++i) out[i] += w * vk[i];
  }
  v = std::move(out);
}

TransientSolution marginalize(const ModelParams& p, double t,
                              std::vector<double> v) {
  TransientSolution sol;
  sol.time = t;
  sol.level_probs.assign(p.capacity + 1, 0.0);
  for (int i = 0; i < p.state_count(); ++i)
    sol.level_probs[chain::state_at(p, i).level] += v[i];
  sol.state_probs = std::move(v);
  return sol;
}

// ---------------------------------------------------------------------
// Spectral machinery for the lambda == mu closed forms. Roots scale
// linearly in mu and the weights are mu-free, so everything internal is
// computed at mu = 1.
// ---------------------------------------------------------------------

// Q(x) = prod (x + 2(2r+1)) and Q2(x) = prod (x + 2(2r+2)) at mu = 1.
SignedLog eval_Q(double x, int N) {
  SignedLog q = SignedLog::one();
  for (int r = 0; r < N; ++r) q = mul(q, SignedLog::from_double(x + 2.0 * (2 * r + 1)));
  return q;
}

SignedLog eval_Q2(double x, int N) {
  SignedLog q = SignedLog::one();
  for (int r = 0; r < N; ++r) q = mul(q, SignedLog::from_double(x + 2.0 * (2 * r + 2)));
  return q;
}

SignedLog eval_S(double x, int N) { return add(eval_Q(x, N), eval_Q2(x, N)); }

// S'(x) = Q(x) sum 1/(x+q_r) + Q2(x) sum 1/(x+s_r).
SignedLog eval_S_prime(double x, int N) {
  double sq = 0.0, sq2 = 0.0;
  for (int r = 0; r < N; ++r) {
    sq += 1.0 / (x + 2.0 * (2 * r + 1));
    sq2 += 1.0 / (x + 2.0 * (2 * r + 2));
  }
  return add(mul(eval_Q(x, N), SignedLog::from_double(sq)),
             mul(eval_Q2(x, N), SignedLog::from_double(sq2)));
}

double bisect_root(int N, double lo, double hi) {
  int slo = eval_S(lo, N).sign;
  for (;;) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    int sm = eval_S(mid, N).sign;
    if (sm == 0) return mid;
    if (sm == slo)
      lo = mid;
    else
      hi = mid;
  }
  // Newton polish (usually a no-op at this point).
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    SignedLog s = eval_S(x, N);
    if (s.sign == 0) break;
    SignedLog sp = eval_S_prime(x, N);
    if (sp.sign == 0) break;
    double step = div(s, sp).to_double();
    double xn = x - step;
    if (xn <= lo || xn >= hi) break;
    x = xn;
  }
  return x;
}

// Fallback: eigenvalues of the companion matrix of the monic form of
// S(x) (degree N, leading coefficient 2).
std::vector<double> companion_roots(int N) {
  std::vector<double> coeff(N + 1, 0.0);  // coeff[i] : x^i, for Q + Q2
  coeff[0] = 0.0;
  std::vector<double> acc{1.0};
  auto convolve_linear = [](std::vector<double> poly, double c) {
    // poly * (x + c)
    std::vector<double> out(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      out[i + 1] += poly[i];
      out[i] += poly[i] * c;
    }
    return out;
  };
  std::vector<double> q{1.0}, q2{1.0};
  for (int r = 0; r < N; ++r) {
    q = convolve_linear(q, 2.0 * (2 * r + 1));
    q2 = convolve_linear(q2, 2.0 * (2 * r + 2));
  }
  for (int i = 0; i <= N; ++i) coeff[i] = q[i] + q2[i];
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) comp(0, i) = -coeff[N - 1 - i] / coeff[N];
  for (int i = 1; i < N; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  std::vector<double> roots;
  for (int i = 0; i < N; ++i) {
    auto ev = es.eigenvalues()(i);
    if (std::fabs(ev.imag()) > 1e-8 * std::fabs(ev.real()))
      throw std::runtime_error("roots_of_P: complex eigenvalue in fallback");
    roots.push_back(ev.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

std::vector<double> negative_roots_unit_mu(int N) {
  std::vector<double> roots;
  roots.reserve(N);
  bool bracket_ok = true;
  for (int k = 0; k < N && bracket_ok; ++k) {
    double lo = -2.0 * (2 * k + 2), hi = -2.0 * (2 * k + 1);
    int slo = eval_S(lo, N).sign, shi = eval_S(hi, N).sign;
    if (slo == 0 || shi == 0 || slo == shi) {
      bracket_ok = false;
      break;
    }
    roots.push_back(bisect_root(N, lo, hi));
  }
  if (!bracket_ok) {
    roots = companion_roots(N);
    for (double r : roots) {
      SignedLog s = eval_S(r, N);
      double scale = std::max(eval_Q(r, N).log_mag, eval_Q2(r, N).log_mag);
      if (s.sign != 0 && s.log_mag - scale > std::log(1e-8))
        throw std::runtime_error("roots_of_P: root isolation failure");
    }
    std::sort(roots.begin(), roots.end(), std::greater<double>());
  }
  // Residual check: |S(alpha)| relative to the constituent products.
  for (double r : roots) {
    SignedLog s = eval_S(r, N);
    double scale = std::max(eval_Q(r, N).log_mag, eval_Q2(r, N).log_mag);
    if (s.sign != 0 && s.log_mag - scale > std::log(1e-10))
      throw std::runtime_error("roots_of_P: residual too large");
  }
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (!(roots[i] < roots[i - 1]))
      throw std::runtime_error("roots_of_P: roots not strictly decreasing");
  return roots;
}

}  // namespace

TransientSolution transient_oracle(const ModelParams& p, double t,
                                   const ChainState& init) {
  p.validate();
  if (t < 0.0) throw std::domain_error("transient_oracle: t >= 0 required");
  chain::Generator g = chain::build_generator(p);
  std::vector<double> v(g.dim, 0.0);
  v[chain::state_index(p, init)] = 1.0;
  double rate = g.max_exit_rate() * (1.0 + 1e-12) + 1e-300;
  double remaining = t;
  while (remaining > 0.0) {
    double dt = std::min(remaining, 500.0 / rate);
    uniformization_advance(g, rate, v, dt);
    remaining -= dt;
  }
  return marginalize(p, t, std::move(v));
}

TransientSolution transient_oracle_rk(const ModelParams& p, double t,
                                      const ChainState& init) {
  p.validate();
  if (t < 0.0) throw std::domain_error("transient_oracle_rk: t >= 0 required");
  chain::Generator g = chain::build_generator(p);
  const int n = g.dim;
  std::vector<double> y(n, 0.0);
  y[chain::state_index(p, init)] = 1.0;
  if (t == 0.0) return marginalize(p, t, std::move(y));

  // Dormand-Prince 5(4).
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto deriv = [&](const std::vector<double>& v, std::vector<double>& dv) {
    g.mul_left(v, dv);
  };

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n),
      y5(n);
  double rate = g.max_exit_rate() + 1e-300;
  double h = std::min(t, 0.1 / rate);
  double x = 0.0;
  const double rtol = 1e-10, atol = 1e-13;
  deriv(y, k1);
  while (x < t) {
    h = std::min(h, t - x);
    auto stage = [&](std::vector<double>& k, double f1, const std::vector<double>& s1,
                     double f2 = 0, const std::vector<double>* s2 = nullptr,
                     double f3 = 0, const std::vector<double>* s3 = nullptr,
                     double f4 = 0, const std::vector<double>* s4 = nullptr,
                     double f5 = 0, const std::vector<double>* s5 = nullptr) {
      for (int i = 0; i < n; ++i) {
        double acc = y[i] + h * f1 * s1[i];
        if (s2) acc += h * f2 * (*s2)[i];
        if (s3) acc += h * f3 * (*s3)[i];
        if (s4) acc += h * f4 * (*s4)[i];
        if (s5) acc += h * f5 * (*s5)[i];
        tmp[i] = acc;
      }
      deriv(tmp, k);
    };
    stage(k2, a21, k1);
    stage(k3, a31, k1, a32, &k2);
    stage(k4, a41, k1, a42, &k2, a43, &k3);
    stage(k5, a51, k1, a52, &k2, a53, &k3, a54, &k4);
    stage(k6, a61, k1, a62, &k2, a63, &k3, a64, &k4, a65, &k5);
    for (int i = 0; i < n; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    deriv(y5, k7);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
      double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
      err = std::max(err, std::fabs(e) / sc);
    }
    if (err <= 1.0) {
      x += h;
      y.swap(y5);
      k1.swap(k7);  // FSAL
    }
    double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
  }
  return marginalize(p, t, std::move(y));
}

SignedLog polynomial_P(double x, int N, double mu) {
  if (N < 1 || !(mu > 0.0)) throw std::domain_error("polynomial_P: bad N or mu");
  SignedLog s1 = SignedLog::one(), s2 = SignedLog::one();
  for (int r = 0; r < N; ++r) {
    s1 = mul(s1, SignedLog::from_double(x + 2.0 * mu * (2 * r + 1)));
    s2 = mul(s2, SignedLog::from_double(x + 2.0 * mu * (2 * r + 2)));
  }
  return mul(SignedLog::from_double(x), add(s1, s2));
}

std::vector<double> roots_of_P(int N, double mu) {
  if (N < 1 || !(mu > 0.0)) throw std::domain_error("roots_of_P: bad N or mu");
  std::vector<double> out;
  out.reserve(N + 1);
  out.push_back(0.0);
  for (double r : negative_roots_unit_mu(N)) out.push_back(r * mu);
  return out;
}

SpectralDecomposition spectral_decomposition(int N, double mu) {
  if (N < 1 || !(mu > 0.0))
    throw std::domain_error("spectral_decomposition: bad N or mu");
  SpectralDecomposition sd;
  sd.N = N;
  sd.mu = mu;
  std::vector<double> neg = negative_roots_unit_mu(N);
  sd.roots.push_back(0.0);
  // R(0) = Q(0) / P'(0) = Q(0) / (Q(0) + Q2(0)).
  sd.weights.push_back(div(eval_Q(0.0, N), eval_S(0.0, N)).to_double());
  for (double r : neg) {
    sd.roots.push_back(r * mu);
    // At a root of S: P'(alpha) = alpha S'(alpha).
    SignedLog pp = mul(SignedLog::from_double(r), eval_S_prime(r, N));
    sd.weights.push_back(div(eval_Q(r, N), pp).to_double());
  }
  return sd;
}

double p0_closed(double t, const SpectralDecomposition& sd) {
  if (t < 0.0) throw std::domain_error("p0_closed: t >= 0 required");
  num::KahanSum sum;
  sum.add(2.0 * sd.weights[0]);  // rho(0)
  for (std::size_t k = 1; k < sd.roots.size(); ++k)
    sum.add(2.0 * sd.weights[k] * std::exp(sd.roots[k] * t));
  return sum.value();
}

double p0_closed(double t, int N, double mu) {
  return p0_closed(t, spectral_decomposition(N, mu));
}

double pr_closed(int r, double t, const SpectralDecomposition& sd) {
  const int N = sd.N;
  const double mu = sd.mu;
  if (r < 1 || r > N) throw std::domain_error("pr_closed: 1 <= r <= N required");
  if (t < 0.0) throw std::domain_error("pr_closed: t >= 0 required");

  using special::binomial_sl;
  using special::hyp2f1_terminating;

  // Block 1: 4^{-N} C(2N, N+r) sum_l C(N,l) (-e^{-4 mu t})^l
  //          2F1(-2l, -N+r; -2N; 2).
  SignedLogSum block1;
  for (int l = 0; l <= N; ++l) {
    SignedLog f = hyp2f1_terminating(-2L * l, static_cast<double>(-N + r),
                                     static_cast<double>(-2 * N), 2.0);
    SignedLog term = mul(binomial_sl(N, l), f);
    term = mul(term, SignedLog::from_log(l % 2 == 0 ? +1 : -1, -4.0 * mu * t * l));
    block1.add_term(term);
  }
  SignedLog b1 = mul(block1.value(),
                     mul(binomial_sl(2 * N, N + r),
                         SignedLog::from_log(+1, -N * std::log(4.0))));

  // Shared coefficient of blocks 2 and 3: mu N 2^{-(2N-2)} (-1)^{N-r}.
  SignedLog coef = SignedLog::from_log((N - r) % 2 == 0 ? +1 : -1,
                                       std::log(mu * N) -
                                           (2.0 * N - 2.0) * std::numbers::ln2);

  // Relaxation sums shared by blocks 2 and 3: for a positive decay rate
  // q (one of 2mu(2N-1-2j) or 4mu(N-j)),
  //   T(q,t) = sum_k R_k e^{-|a_k| t} / (|a_k| - q)
  //            - e^{-q t} sum_k R_k / (|a_k| - q).
  auto relaxation = [&](double q) -> SignedLog {
    SignedLogSum with_t, flat;
    for (std::size_t k = 0; k < sd.roots.size(); ++k) {
      double absa = -sd.roots[k];
      double den = absa - q;
      if (std::fabs(den) < 1e-9 * mu)
        throw std::runtime_error(
            "pr_closed: singular configuration (root collides with decay rate)");
      SignedLog c = SignedLog::from_double(sd.weights[k] / den);
      with_t.add_term(mul(c, SignedLog::from_log(+1, -absa * t)));
      flat.add_term(c);
    }
    return sub(with_t.value(),
               mul(SignedLog::from_log(+1, -q * t), flat.value()));
  };

  // Block 2.
  SignedLogSum block2;
  for (int j = 0; j < N; ++j) {
    SignedLog f2a = hyp2f1_terminating(-2L * j, static_cast<double>(-N + r + 1),
                                       static_cast<double>(-2 * N + 1), 2.0);
    SignedLog f2b = hyp2f1_terminating(-2L * j, static_cast<double>(-N + r),
                                       static_cast<double>(-2 * N + 1), 2.0);
    SignedLog bracket = sub(mul(binomial_sl(2 * N - 1, N + r), f2a),
                            mul(binomial_sl(2 * N - 1, N + r - 1), f2b));
    SignedLog term = mul(binomial_sl(N - 1, j), bracket);
    if ((N - 1 - j) % 2 != 0) term = -term;
    term = mul(term, relaxation(2.0 * mu * (2 * N - 1 - 2 * j)));
    block2.add_term(term);
  }
  SignedLog b2 = mul(coef, block2.value());

  // Block 3.
  SignedLogSum block3;
  for (int j = 0; j < N; ++j) {
    SignedLog f3 = hyp2f1_terminating(-2L * j, static_cast<double>(-N + r),
                                      static_cast<double>(-2 * N), 2.0);
    SignedLog term = mul(binomial_sl(N - 1, j), f3);
    if ((N - 1 - j) % 2 != 0) term = -term;
    term = mul(term, relaxation(4.0 * mu * (N - j)));
    block3.add_term(term);
  }
  SignedLog b3 = mul(mul(coef, binomial_sl(2 * N, N + r)), block3.value());

  num::KahanSum total;
  total.add(b1.to_double());
  total.add(b2.to_double());
  total.add(b3.to_double());
  return total.value();
}

double pr_closed(int r, double t, int N, double mu) {
  return pr_closed(r, t, spectral_decomposition(N, mu));
}

std::vector<double> closed_level_distribution(double t, int N, double mu) {
  SpectralDecomposition sd = spectral_decomposition(N, mu);
  std::vector<double> probs(N + 1);
  probs[0] = p0_closed(t, sd);
  for (int r = 1; r <= N; ++r) probs[r] = pr_closed(r, t, sd);
  for (double& v : probs)
    if (v < 0.0 && v > -1e-12) v = 0.0;
  return probs;
}

double laplace_H(double eta, const ModelParams& p) {
  p.validate();
  if (eta < 0.0) throw std::domain_error("laplace_H: eta >= 0 required");
  if (eta == 0.0) return std::numeric_limits<double>::infinity();
  const int N = p.capacity;
  const double lambda = p.lambda, mu = p.mu;
  if (std::fabs(lambda - mu) <= 1e-12 * (lambda + mu)) {
    double x = eta / (4.0 * mu);
    double la = special::ln_gamma(1.0 + x) + special::ln_gamma(N + 0.5 + x);
    double lb = special::ln_gamma(N + 1.0 + x) + special::ln_gamma(0.5 + x);
    return (2.0 / eta) / (1.0 + std::exp(lb - la));
  }
  const double s = lambda + mu;
  const double e = eta / s;
  const double z = -lambda / mu;
  SignedLog f1 = special::hyp2f1_terminating(-N, e, 1.0 + N + e, z);
  SignedLog f2 = special::hyp2f1_terminating(1 - N, 1.0 + e, 1.0 + N + e, z);
  SignedLog f3 = special::hyp2f1_terminating(1 - N, 2.0 + e, 2.0 + N + e, z);
  SignedLog num = mul(SignedLog::from_double(mu), f1);
  SignedLog den =
      add(mul(SignedLog::from_double(eta * mu), f2),
          mul(SignedLog::from_double(eta * lambda * (eta + s) / (s * (N + 1) + eta)),
              f3));
  return div(num, den).to_double();
}

num::CubicSpline p0_oracle_spline(const ModelParams& p, double T, int nodes) {
  p.validate();
  if (nodes < 4) nodes = 4;
  chain::Generator g = chain::build_generator(p);
  std::vector<double> v(g.dim, 0.0);
  v[chain::state_index(p, chain::ChainState::origin(1))] = 1.0;
  double rate = g.max_exit_rate() * (1.0 + 1e-12) + 1e-300;
  std::vector<double> ts, p0s;
  ts.reserve(nodes);
  p0s.reserve(nodes);
  const double a = 6.0;  // clustering strength near t = 0
  double prev = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double ti = T * std::expm1(a * i / (nodes - 1.0)) / std::expm1(a);
    double dt = ti - prev;
    while (dt > 0.0) {
      double step = std::min(dt, 500.0 / rate);
      uniformization_advance(g, rate, v, step);
      dt -= step;
    }
    prev = ti;
    double p0 = 0.0;
    for (int l = 0; l < p.rays; ++l) p0 += v[l];
    ts.push_back(ti);
    p0s.push_back(p0);
  }
  return num::CubicSpline(std::move(ts), std::move(p0s));
}

double pgf_F(double z, double t, const ModelParams& p) {
  p.validate();
  if (z < 0.0 || z > 1.0) throw std::domain_error("pgf_F: z in [0,1] required");
  if (t < 0.0) throw std::domain_error("pgf_F: t >= 0 required");
  if (t == 0.0 || z == 1.0) return 1.0;
  const int N = p.capacity;
  const double lambda = p.lambda, mu = p.mu;
  const double a0 = lambda + mu;
  const bool symmetric = std::fabs(lambda - mu) <= 1e-12 * a0;

  // p(0, y) supplier.
  SpectralDecomposition sd;
  num::CubicSpline spline;
  if (symmetric)
    sd = spectral_decomposition(N, mu);
  else
    spline = p0_oracle_spline(p, t);
  auto p0_at = [&](double y) {
    return symmetric ? p0_closed(y, sd) : spline(y);
  };

  if (z == 0.0) return p0_at(t);  // boundary value, the formula's z->0 limit

  // Closed term, rescaled so all powers stay bounded:
  // [ ((z l + m) + m (z-1) u) ((z l + m) + l (1-z) u) / (a0^2 z) ]^N,
  // u = e^{-t a0}.
  double u = std::exp(-t * a0);
  double zl_mu = z * lambda + mu;
  double A1 = zl_mu + mu * (z - 1.0) * u;
  double B1 = zl_mu + lambda * (1.0 - z) * u;
  SignedLog term1 = SignedLog::from_log(
      +1, N * (std::log(A1) + std::log(B1) - 2.0 * std::log(a0) - std::log(z)));

  // Integral term: coefficient -mu N (1-z) / z^N times
  // int_0^t p0(y) e^{-(t-y) a0} a(t-y)^N b(t-y)^{N-1} dy with a, b <= 1.
  auto integrand = [&](double y) {
    double tau = t - y;
    double w = std::exp(-tau * a0);
    double aa = (zl_mu + lambda * (1.0 - z) * w) / a0;
    double bb = (zl_mu - mu * (1.0 - z) * w) / a0;
    return p0_at(y) * w * std::pow(aa, N) * std::pow(bb, N - 1);
  };
  double integral = num::integrate(integrand, 0.0, t, 1e-13);
  SignedLog coef = SignedLog::from_log(
      -1, std::log(mu * N * (1.0 - z)) - N * std::log(z));
  SignedLog total = add(term1, mul(coef, SignedLog::from_double(integral)));
  return total.to_double();
}

}  // namespace espider::transient
