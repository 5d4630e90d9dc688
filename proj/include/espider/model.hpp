#ifndef ESPIDER_MODEL_HPP
#define ESPIDER_MODEL_HPP

#include <string>
#include <vector>

namespace espider::chain {

/// Row-stochastic d x d switching matrix: row l gives the law of the next
/// ray when the system leaves the empty state after visiting ray l.
struct SwitchMatrix {
  int d = 1;
  std::vector<double> c;  // row-major, c[(l-1)*d + (j-1)]

  double at(int l, int j) const { return c[(l - 1) * d + (j - 1)]; }
  double& at(int l, int j) { return c[(l - 1) * d + (j - 1)]; }

  static SwitchMatrix identity(int d);
  void validate() const;  // entries >= 0, rows sum to 1 within 1e-12
};

enum class SwitchKind { Uniform, UniformExcl, Cyclic, Sequential, RandomWalk };

const char* to_string(SwitchKind k);
SwitchKind switch_kind_from_string(const std::string& s);

/// The five switching schemes of the catalogue. p is the upward
/// probability of the random-walk scheme and is ignored by the others.
SwitchMatrix example_switch_matrix(SwitchKind kind, int d, double p = 0.5);

/// Solves pi C = pi, sum pi = 1. Implemented as power iteration on the
/// lazy kernel (C + I)/2 (same fixed points, aperiodic) starting from the
/// uniform vector, so reducible matrices converge to the limit law of
/// C^n from a uniform start (sequential scheme: mass on the absorbing
/// ray d).
std::vector<double> switch_stationary(const SwitchMatrix& C);

/// Full parameterization of the chain: up-rate lambda(N-k), down-rate
/// mu(N+k) on each ray, capacity N, d rays joined at the origin, ray
/// switching at the origin by C.
struct ModelParams {
  double lambda = 1.0;
  double mu = 1.0;
  int capacity = 1;  // N
  int rays = 1;      // d
  SwitchMatrix switching;

  void validate() const;
  double rho() const { return lambda / mu; }
  int state_count() const { return rays * (capacity + 1); }

  std::string to_json() const;
  static ModelParams from_json(const std::string& text);
};

/// State of the chain: the origin remembers the last visited ray.
struct ChainState {
  int level = 0;  // 0 = origin
  int ray = 1;    // occupied ray, or last visited ray when at the origin

  static ChainState origin(int last_ray) { return {0, last_ray}; }
  static ChainState interior(int level, int ray) { return {level, ray}; }
  bool at_origin() const { return level == 0; }
  bool operator==(const ChainState&) const = default;
};

/// Enumeration: origin states first (by last ray), then levels ascending
/// with rays ascending inside each level, so the generator is block
/// tridiagonal by level.
int state_index(const ModelParams& p, const ChainState& s);
ChainState state_at(const ModelParams& p, int index);

/// q(from -> to); 0 for pairs with no transition.
double transition_rate(const ChainState& from, const ChainState& to,
                       const ModelParams& p);

/// Conservative rate matrix in CSR form over the enumerated state set.
struct Generator {
  int dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  /// out = v Q (left action on a row vector).
  void mul_left(const std::vector<double>& v, std::vector<double>& out) const;

  /// Largest total exit rate over states.
  double max_exit_rate() const;
};

Generator build_generator(const ModelParams& p);

/// Stationary law of the full chain (left null vector of the generator,
/// restricted to the recurrent class and normalized), then marginalized
/// over rays: returns (N+1) level probabilities.
std::vector<double> generator_stationary_levels(const ModelParams& p);

}  // namespace espider::chain

#endif
