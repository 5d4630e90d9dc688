#ifndef ESPIDER_DIFFUSION_HPP
#define ESPIDER_DIFFUSION_HPP

#include "espider/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace espider::diff {

using chain::SwitchMatrix;

/// Parameters of the limiting process on the spider. The discrete chain
/// with lambda = alpha/2 + gamma eps/2, mu = alpha/2 - gamma eps/2
/// converges (eps -> 0, N eps^2 -> nu) to a reflected
/// Ornstein-Uhlenbeck motion with drift -alpha (x - beta) and variance
/// sigma^2 = alpha nu, beta = gamma nu / alpha.
struct DiffusionParams {
  double alpha = 1.0;
  double gamma = 0.0;
  double epsilon = 0.1;
  double nu = 1.0;

  double sigma2() const { return alpha * nu; }
  double beta() const { return gamma * nu / alpha; }
  double lambda() const { return 0.5 * alpha + 0.5 * gamma * epsilon; }
  double mu() const { return 0.5 * alpha - 0.5 * gamma * epsilon; }

  void validate() const;
};

/// Forward map (alpha, gamma, nu, eps) -> params; throws when the
/// implied discrete rates are not positive (|gamma| eps >= alpha).
DiffusionParams scale_params(double alpha, double gamma, double nu,
                             double epsilon);

/// Inverse map from discrete rates: alpha = lambda + mu,
/// gamma = (lambda - mu) / eps, nu = N eps^2.
DiffusionParams params_from_rates(double lambda, double mu, double epsilon,
                                  int N);

/// Normalizing constant of the stationary density,
/// Q = (sigma sqrt(pi) / (2 sqrt(alpha))) (1 + Erf(sqrt(alpha) beta /
/// sigma)) exp(alpha beta^2 / sigma^2). Named norm_Q: Q(x) is already
/// taken by the spectral polynomial.
double norm_Q(const DiffusionParams& p);

/// Stationary density w(x) = exp{-(2 alpha x / sigma^2)(x/2 - beta)}/Q
/// on x >= 0 (truncated Gaussian with mode at max(beta, 0)).
double stationary_density_w(double x, const DiffusionParams& p);

/// w(x, j) = w(x) pi_j with pi the stationary vector of C.
double ray_density(double x, int j, const DiffusionParams& p,
                   const SwitchMatrix& C);

struct XMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Stationary mean and variance of the position.
XMoments moments_X(const DiffusionParams& p);

struct SpiderState {
  double x = 0.0;
  int ray = 1;  // at x == 0 stores the last visited ray
};

/// Euler-Maruyama path on the spider: on the current ray,
/// x' = x - alpha (x - beta) dt + sigma sqrt(dt) xi; a step ending at or
/// below 0 reflects to |x'| and resamples the ray from row l of C
/// (exactly once per contact). Stability guard: alpha dt < 0.5.
///
/// `on_step(t, state, vertex_contact)` is invoked after every step;
/// heavy campaigns histogram on the fly rather than storing the path.
void simulate_spider_ou(const DiffusionParams& p, const SwitchMatrix& C,
                        double horizon, double dt, SpiderState init,
                        std::uint64_t seed,
                        const std::function<void(double, const SpiderState&,
                                                 bool)>& on_step);

/// Convenience wrapper returning the sampled path (small runs).
std::vector<SpiderState> simulate_spider_ou_path(const DiffusionParams& p,
                                                 const SwitchMatrix& C,
                                                 double horizon, double dt,
                                                 SpiderState init,
                                                 std::uint64_t seed);

struct FpGrid {
  double x_max = 10.0;
  int n_cells = 1000;
};

/// Conservative finite-volume evolution of the level-marginal density
/// h under dh/dt = -d/dx[-alpha(x-beta) h] + (sigma^2/2) d^2h/dx^2 with
/// zero flux at x = 0 (the vertex condition alpha beta h(0) -
/// (sigma^2/2) h'(0) = 0 is exactly a vanishing numerical flux) and at
/// x_max. Scharfetter-Gummel face fluxes make the discrete steady state
/// match the continuous one at cell centers; Crank-Nicolson stepping
/// keeps mass to roundoff. dt <= 0 picks an internal step; a supplied
/// dt must satisfy the advective CFL bound dt < dx / max|drift|.
std::vector<double> fokker_planck_evolve(std::vector<double> h0,
                                         const DiffusionParams& p,
                                         double t_end, const FpGrid& grid,
                                         double dt = 0.0);

/// Cell-center values of w on the grid, normalized to unit mass
/// (reference for steady-state comparisons).
std::vector<double> w_on_grid(const DiffusionParams& p, const FpGrid& grid);

}  // namespace espider::diff

#endif
