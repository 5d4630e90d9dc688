#ifndef ESPIDER_TRANSIENT_HPP
#define ESPIDER_TRANSIENT_HPP

#include "espider/model.hpp"
#include "espider/numeric.hpp"
#include "espider/signed_log.hpp"

#include <vector>

namespace espider::transient {

using chain::ChainState;
using chain::ModelParams;

/// Law of the chain at a fixed time.
struct TransientSolution {
  double time = 0.0;
  std::vector<double> level_probs;  // p(k,t), k = 0..N
  std::vector<double> state_probs;  // full vector in enumeration order
};

/// Numerically exact transient law by uniformization (Poisson-weighted
/// powers of the uniformized kernel), truncation error < 1e-12.
TransientSolution transient_oracle(const ModelParams& p, double t,
                                   const ChainState& init);

/// Same law by adaptive Dormand-Prince integration of the forward
/// equations; the two oracles must agree to 1e-9.
TransientSolution transient_oracle_rk(const ModelParams& p, double t,
                                      const ChainState& init);

/// P(x) = x [ prod_{r<N} (x + 2mu(2r+1)) + prod_{r<N} (x + 2mu(2r+2)) ],
/// evaluated in product form.
SignedLog polynomial_P(double x, int N, double mu);

/// Roots 0 = alpha_1 > alpha_2 > ... > alpha_{N+1} of P and the residue
/// weights R(alpha_k) = Q(alpha_k) / P'(alpha_k) of the p(0,t) expansion,
/// where Q(x) = prod_{r<N} (x + 2mu(2r+1)). P has leading coefficient 2,
/// so P'(alpha_k) is the limit form of the weight denominator, not the
/// bare root-difference product.
struct SpectralDecomposition {
  int N = 0;
  double mu = 1.0;
  std::vector<double> roots;    // size N+1, roots[0] == 0
  std::vector<double> weights;  // R(alpha_k), dimensionless
};

/// Each negative root of P lies strictly between consecutive roots of the
/// two constituent products: alpha in (-2mu(2k+2), -2mu(2k+1)) for
/// k = 0..N-1, with a guaranteed sign change of P at the endpoints.
/// Bisection inside these brackets plus a Newton polish; a companion
/// matrix eigensolve backs the path up if a bracket ever fails.
std::vector<double> roots_of_P(int N, double mu);

SpectralDecomposition spectral_decomposition(int N, double mu);

/// p(0,t) for lambda = mu: rho(0) + 2 sum_{k>=2} R(alpha_k) e^{alpha_k t}.
double p0_closed(double t, int N, double mu);
double p0_closed(double t, const SpectralDecomposition& sd);

/// p(r,t) for lambda = mu, r = 1..N (three-block spectral formula).
double pr_closed(int r, double t, int N, double mu);
double pr_closed(int r, double t, const SpectralDecomposition& sd);

/// All of p(0..N, t) for lambda = mu, assembled from the closed forms.
std::vector<double> closed_level_distribution(double t, int N, double mu);

/// Laplace transform H(eta) of p(0,t). Dispatches to the Gamma-ratio
/// form when lambda == mu, else to the hypergeometric form.
double laplace_H(double eta, const ModelParams& p);

/// p(0, y) sampled on [0, T] (oracle marching + natural cubic spline on
/// a geometrically refined grid with >= 200 nodes).
num::CubicSpline p0_oracle_spline(const ModelParams& p, double T,
                                  int nodes = 320);

/// Probability generating function F(z,t) = E[z^{N(t)}] from the
/// characteristic-curve solution; the integral term is evaluated by
/// adaptive quadrature with p(0,y) from the closed form (lambda == mu)
/// or the oracle spline.
double pgf_F(double z, double t, const ModelParams& p);

}  // namespace espider::transient

#endif
