#include "espider/diffusion.hpp"

#include "espider/rng.hpp"
#include "espider/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace espider::diff {

void DiffusionParams::validate() const {
  if (!(alpha > 0.0)) throw std::domain_error("diffusion: alpha > 0 required");
  if (!(nu > 0.0)) throw std::domain_error("diffusion: nu > 0 required");
  if (!(epsilon > 0.0)) throw std::domain_error("diffusion: epsilon > 0 required");
  if (!(std::fabs(gamma) * epsilon < alpha))
    throw std::domain_error("diffusion: |gamma| eps < alpha required "
                            "(discrete rates would not be positive)");
}

DiffusionParams scale_params(double alpha, double gamma, double nu,
                             double epsilon) {
  DiffusionParams p{alpha, gamma, epsilon, nu};
  p.validate();
  return p;
}

DiffusionParams params_from_rates(double lambda, double mu, double epsilon,
                                  int N) {
  if (!(lambda > 0.0 && mu > 0.0))
    throw std::domain_error("params_from_rates: rates must be positive");
  if (!(epsilon > 0.0) || N < 1)
    throw std::domain_error("params_from_rates: eps > 0, N >= 1 required");
  DiffusionParams p;
  p.alpha = lambda + mu;
  p.gamma = (lambda - mu) / epsilon;
  p.epsilon = epsilon;
  p.nu = static_cast<double>(N) * epsilon * epsilon;
  p.validate();
  return p;
}

double norm_Q(const DiffusionParams& p) {
  double sigma = std::sqrt(p.sigma2());
  double b = p.beta();
  double sa = std::sqrt(p.alpha);
  double x0 = sa * b / sigma;
  double front = sigma * std::sqrt(std::numbers::pi) / (2.0 * sa);
  // (1 + erf(x0)) e^{x0^2} = erfcx(-x0) for x0 <= 0; that identity keeps
  // the constant finite when the mode sits far below the vertex.
  if (x0 <= 0.0) return front * special::erfcx(-x0);
  return front * (1.0 + special::erf(x0)) * std::exp(x0 * x0);
}

double stationary_density_w(double x, const DiffusionParams& p) {
  if (x < 0.0) throw std::domain_error("w: x >= 0 required");
  double b = p.beta();
  return std::exp(-2.0 * p.alpha * x / p.sigma2() * (0.5 * x - b)) / norm_Q(p);
}

double ray_density(double x, int j, const DiffusionParams& p,
                   const SwitchMatrix& C) {
  if (j < 1 || j > C.d) throw std::domain_error("ray_density: bad ray");
  std::vector<double> pi = chain::switch_stationary(C);
  return stationary_density_w(x, p) * pi[j - 1];
}

XMoments moments_X(const DiffusionParams& p) {
  p.validate();
  double sigma = std::sqrt(p.sigma2());
  double b = p.beta();
  double sa = std::sqrt(p.alpha);
  XMoments m;
  if (b == 0.0) {
    m.mean = sigma / std::sqrt(std::numbers::pi * p.alpha);
    m.variance = p.sigma2() / (2.0 * p.alpha) * (1.0 - 2.0 / std::numbers::pi);
    return m;
  }
  // ratio = e^{-x0^2} / (1 + erf(x0)), via erfcx on the negative side.
  double x0 = sa * b / sigma;
  double ratio = x0 <= 0.0
                     ? 1.0 / special::erfcx(-x0)
                     : std::exp(-x0 * x0) / (1.0 + special::erf(x0));
  m.mean = b + sigma / (std::sqrt(std::numbers::pi) * sa) * ratio;
  m.variance = p.sigma2() / (2.0 * p.alpha) *
               (1.0 - 2.0 / std::numbers::pi * ratio * ratio -
                2.0 * b * sa / (std::sqrt(std::numbers::pi) * sigma) * ratio);
  return m;
}

void simulate_spider_ou(const DiffusionParams& p, const SwitchMatrix& C,
                        double horizon, double dt, SpiderState init,
                        std::uint64_t seed,
                        const std::function<void(double, const SpiderState&,
                                                 bool)>& on_step) {
  p.validate();
  C.validate();
  if (!(dt > 0.0) || !(horizon > dt))
    throw std::domain_error("simulate_spider_ou: need 0 < dt < horizon");
  if (p.alpha * dt >= 0.5)
    throw std::domain_error("simulate_spider_ou: alpha dt >= 0.5 is unstable");
  const double sigma_dt = std::sqrt(p.sigma2() * dt);
  const double b = p.beta();
  SplitMix64 rng(seed);
  SpiderState s = init;
  std::vector<double> row(C.d);
  long steps = static_cast<long>(horizon / dt);
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    double x = s.x - p.alpha * (s.x - b) * dt + sigma_dt * rng.next_normal();
    bool contact = x <= 0.0;
    if (contact) {
      x = std::fabs(x);
      for (int j = 1; j <= C.d; ++j) row[j - 1] = C.at(s.ray, j);
      s.ray = rng.next_categorical(row, C.d, 1.0) + 1;
    }
    s.x = x;
    t += dt;
    on_step(t, s, contact);
  }
}

std::vector<SpiderState> simulate_spider_ou_path(const DiffusionParams& p,
                                                 const SwitchMatrix& C,
                                                 double horizon, double dt,
                                                 SpiderState init,
                                                 std::uint64_t seed) {
  std::vector<SpiderState> path;
  path.reserve(static_cast<std::size_t>(horizon / dt) + 1);
  path.push_back(init);
  simulate_spider_ou(p, C, horizon, dt, init, seed,
                     [&](double, const SpiderState& s, bool) {
                       path.push_back(s);
                     });
  return path;
}

namespace {

// Bernoulli function x / (e^x - 1), stable near 0.
double bernoulli_fn(double x) {
  if (std::fabs(x) < 1e-5) return 1.0 - 0.5 * x + x * x / 12.0;
  return x / std::expm1(x);
}

void thomas_solve(std::vector<double>& sub, std::vector<double>& diag,
                  std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

std::vector<double> fokker_planck_evolve(std::vector<double> h,
                                         const DiffusionParams& p,
                                         double t_end, const FpGrid& grid,
                                         double dt) {
  p.validate();
  const int n = grid.n_cells;
  if (n < 3) throw std::domain_error("fokker_planck: n_cells >= 3");
  const double b = p.beta();
  const double sigma2 = p.sigma2();
  const double required = b + 8.0 * std::sqrt(sigma2) / std::sqrt(2.0 * p.alpha);
  if (grid.x_max < required)
    throw std::domain_error("fokker_planck: x_max below the far-field bound");
  if (static_cast<int>(h.size()) != n)
    throw std::domain_error("fokker_planck: h0 size != n_cells");
  const double dx = grid.x_max / n;
  const double D = 0.5 * sigma2;

  double max_drift = 0.0;
  for (int f = 1; f < n; ++f) {
    double xf = f * dx;
    max_drift = std::max(max_drift, std::fabs(-p.alpha * (xf - b)));
  }
  if (dt > 0.0) {
    if (dt * max_drift >= dx)
      throw std::domain_error(
          "fokker_planck: CFL violated, request a smaller time step");
  } else {
    dt = std::min(0.02 / p.alpha, 0.5 * dx / (max_drift + 1e-300));
  }

  // Interior face f (between cells f-1 and f), Scharfetter-Gummel:
  //   J_f = (D/dx) [ B(-Pe_f) h_{f-1} - B(Pe_f) h_f ],
  //   Pe_f = A(x_f) dx / D, A(x) = -alpha (x - beta).
  // Boundary faces carry zero flux. L h gives dh/dt.
  std::vector<double> bm(n), bp(n);  // per interior face f = 1..n-1
  for (int f = 1; f < n; ++f) {
    double pe = -p.alpha * (f * dx - b) * dx / D;
    bm[f] = bernoulli_fn(-pe);
    bp[f] = bernoulli_fn(pe);
  }
  const double r = D / (dx * dx);
  // Tridiagonal L: (Lh)_i = (J_i - J_{i+1}) / dx.
  std::vector<double> lsub(n, 0.0), ldiag(n, 0.0), lsup(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double self = 0.0;
    if (i > 0) {       // face i between cells i-1, i
      lsub[i] = r * bm[i];
      self -= r * bp[i];
    }
    if (i + 1 < n) {   // face i+1 between cells i, i+1
      lsup[i] = r * bp[i + 1];
      self -= r * bm[i + 1];
    }
    ldiag[i] = self;
  }

  auto apply_L = [&](const std::vector<double>& v, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = ldiag[i] * v[i];
      if (i > 0) acc += lsub[i] * v[i - 1];
      if (i + 1 < n) acc += lsup[i] * v[i + 1];
      out[i] = acc;
    }
  };

  // Crank-Nicolson: (I - dt/2 L) h' = (I + dt/2 L) h.
  std::vector<double> rhs(n), lv(n);
  double t = 0.0;
  while (t < t_end) {
    double step = std::min(dt, t_end - t);
    apply_L(h, lv);
    for (int i = 0; i < n; ++i) rhs[i] = h[i] + 0.5 * step * lv[i];
    std::vector<double> sub(n), diag(n), sup(n);
    for (int i = 0; i < n; ++i) {
      sub[i] = -0.5 * step * lsub[i];
      sup[i] = -0.5 * step * lsup[i];
      diag[i] = 1.0 - 0.5 * step * ldiag[i];
    }
    thomas_solve(sub, diag, sup, rhs);
    h = rhs;
    t += step;
  }
  return h;
}

std::vector<double> w_on_grid(const DiffusionParams& p, const FpGrid& grid) {
  std::vector<double> w(grid.n_cells);
  double dx = grid.x_max / grid.n_cells;
  double total = 0.0;
  for (int i = 0; i < grid.n_cells; ++i) {
    w[i] = stationary_density_w((i + 0.5) * dx, p);
    total += w[i] * dx;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace espider::diff
