#include "espider/model.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace espider::chain {

using nlohmann::json;

SwitchMatrix SwitchMatrix::identity(int d) {
  SwitchMatrix m;
  m.d = d;
  m.c.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int l = 1; l <= d; ++l) m.at(l, l) = 1.0;
  return m;
}

void SwitchMatrix::validate() const {
  if (d < 1 || c.size() != static_cast<std::size_t>(d) * d)
    throw std::domain_error("SwitchMatrix: bad dimension");
  for (int l = 1; l <= d; ++l) {
    double row = 0.0;
    for (int j = 1; j <= d; ++j) {
      if (at(l, j) < 0.0) throw std::domain_error("SwitchMatrix: negative entry");
      row += at(l, j);
    }
    if (std::fabs(row - 1.0) > 1e-12)
      throw std::domain_error("SwitchMatrix: row does not sum to 1");
  }
}

const char* to_string(SwitchKind k) {
  switch (k) {
    case SwitchKind::Uniform: return "uniform";
    case SwitchKind::UniformExcl: return "uniform-excl";
    case SwitchKind::Cyclic: return "cyclic";
    case SwitchKind::Sequential: return "sequential";
    case SwitchKind::RandomWalk: return "random-walk";
  }
  return "?";
}

SwitchKind switch_kind_from_string(const std::string& s) {
  if (s == "uniform") return SwitchKind::Uniform;
  if (s == "uniform-excl") return SwitchKind::UniformExcl;
  if (s == "cyclic") return SwitchKind::Cyclic;
  if (s == "sequential") return SwitchKind::Sequential;
  if (s == "random-walk") return SwitchKind::RandomWalk;
  throw std::domain_error("unknown switch kind: " + s);
}

SwitchMatrix example_switch_matrix(SwitchKind kind, int d, double p) {
  if (d < 1) throw std::domain_error("switch matrix: d >= 1 required");
  SwitchMatrix m;
  m.d = d;
  m.c.assign(static_cast<std::size_t>(d) * d, 0.0);
  switch (kind) {
    case SwitchKind::Uniform:
      for (auto& v : m.c) v = 1.0 / d;
      break;
    case SwitchKind::UniformExcl:
      if (d < 2)
        throw std::domain_error("uniform-excl: needs d >= 2 (no self transition)");
      for (int l = 1; l <= d; ++l)
        for (int j = 1; j <= d; ++j)
          if (j != l) m.at(l, j) = 1.0 / (d - 1);
      break;
    case SwitchKind::Cyclic:
      for (int l = 1; l < d; ++l) m.at(l, l + 1) = 1.0;
      m.at(d, 1) = 1.0;
      break;
    case SwitchKind::Sequential:
      for (int l = 1; l < d; ++l) m.at(l, l + 1) = 1.0;
      m.at(d, d) = 1.0;
      break;
    case SwitchKind::RandomWalk:
      if (d < 2) throw std::domain_error("random-walk: needs d >= 2");
      if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("random-walk: needs 0 < p < 1");
      m.at(1, 2) = 1.0;
      for (int l = 2; l < d; ++l) {
        m.at(l, l - 1) = 1.0 - p;
        m.at(l, l + 1) = p;
      }
      m.at(d, d - 1) = 1.0;
      break;
  }
  m.validate();
  return m;
}

std::vector<double> switch_stationary(const SwitchMatrix& C) {
  C.validate();
  const int d = C.d;
  std::vector<double> pi(d, 1.0 / d), next(d, 0.0);
  for (int iter = 0; iter < 2000000; ++iter) {
    // next = pi (C + I) / 2
    for (int j = 0; j < d; ++j) next[j] = 0.5 * pi[j];
    for (int l = 1; l <= d; ++l)
      for (int j = 1; j <= d; ++j)
        next[j - 1] += 0.5 * pi[l - 1] * C.at(l, j);
    double diff = 0.0, tot = 0.0;
    for (int j = 0; j < d; ++j) {
      diff += std::fabs(next[j] - pi[j]);
      tot += next[j];
    }
    for (int j = 0; j < d; ++j) pi[j] = next[j] / tot;
    if (diff < 1e-15) break;
  }
  return pi;
}

void ModelParams::validate() const {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw std::domain_error("ModelParams: rates must be positive");
  if (capacity < 1) throw std::domain_error("ModelParams: N >= 1 required");
  if (rays < 1) throw std::domain_error("ModelParams: d >= 1 required");
  if (switching.d != rays)
    throw std::domain_error("ModelParams: switch matrix dimension != d");
  switching.validate();
}

std::string ModelParams::to_json() const {
  json j;
  j["lambda"] = lambda;
  j["mu"] = mu;
  j["N"] = capacity;
  j["d"] = rays;
  json sw;
  std::vector<std::vector<double>> rows(rays);
  for (int l = 1; l <= rays; ++l)
    for (int jj = 1; jj <= rays; ++jj) rows[l - 1].push_back(switching.at(l, jj));
  sw["matrix"] = rows;
  j["switch"] = sw;
  return j.dump();
}

ModelParams ModelParams::from_json(const std::string& text) {
  json j = json::parse(text);
  ModelParams p;
  p.lambda = j.at("lambda").get<double>();
  p.mu = j.at("mu").get<double>();
  p.capacity = j.at("N").get<int>();
  p.rays = j.at("d").get<int>();
  const json& sw = j.at("switch");
  if (sw.contains("matrix")) {
    auto rows = sw.at("matrix").get<std::vector<std::vector<double>>>();
    SwitchMatrix m;
    m.d = p.rays;
    m.c.assign(static_cast<std::size_t>(p.rays) * p.rays, 0.0);
    if (static_cast<int>(rows.size()) != p.rays)
      throw std::domain_error("config: switch matrix must be d x d");
    for (int l = 1; l <= p.rays; ++l) {
      if (static_cast<int>(rows[l - 1].size()) != p.rays)
        throw std::domain_error("config: switch matrix must be d x d");
      for (int jj = 1; jj <= p.rays; ++jj) m.at(l, jj) = rows[l - 1][jj - 1];
    }
    p.switching = m;
  } else {
    SwitchKind kind = switch_kind_from_string(sw.at("kind").get<std::string>());
    double pp = sw.value("p", 0.5);
    p.switching = example_switch_matrix(kind, p.rays, pp);
  }
  p.validate();
  return p;
}

int state_index(const ModelParams& p, const ChainState& s) {
  if (s.ray < 1 || s.ray > p.rays) throw std::domain_error("state: bad ray");
  if (s.level < 0 || s.level > p.capacity)
    throw std::domain_error("state: bad level");
  if (s.level == 0) return s.ray - 1;
  return p.rays + (s.level - 1) * p.rays + (s.ray - 1);
}

ChainState state_at(const ModelParams& p, int index) {
  if (index < p.rays) return ChainState::origin(index + 1);
  int rest = index - p.rays;
  return ChainState::interior(rest / p.rays + 1, rest % p.rays + 1);
}

double transition_rate(const ChainState& from, const ChainState& to,
                       const ModelParams& p) {
  const int N = p.capacity;
  if (from.at_origin()) {
    // origin(l) -> (1, j) at c_{l,j} lambda N
    if (to.level == 1) return p.switching.at(from.ray, to.ray) * p.lambda * N;
    return 0.0;
  }
  if (from.ray != to.ray) return 0.0;
  if (to.level == from.level + 1 && from.level < N)
    return p.lambda * (N - from.level);
  // (1, j) -> origin(j): the origin keeps j as the last visited ray
  if (to.level == from.level - 1) return p.mu * (N + from.level);
  return 0.0;
}

Generator build_generator(const ModelParams& p) {
  p.validate();
  const int n = p.state_count();
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (int i = 0; i < n; ++i) {
    ChainState s = state_at(p, i);
    double exit = 0.0;
    auto push = [&](const ChainState& t) {
      double r = transition_rate(s, t, p);
      if (r > 0.0) {
        rows[i].emplace_back(state_index(p, t), r);
        exit += r;
      }
    };
    if (s.at_origin()) {
      for (int j = 1; j <= p.rays; ++j) push(ChainState::interior(1, j));
    } else {
      if (s.level < p.capacity) push(ChainState::interior(s.level + 1, s.ray));
      if (s.level > 1)
        push(ChainState::interior(s.level - 1, s.ray));
      else
        push(ChainState::origin(s.ray));
    }
    rows[i].emplace_back(i, -exit);
  }
  Generator g;
  g.dim = n;
  g.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) g.row_ptr[i + 1] = g.row_ptr[i] + rows[i].size();
  g.col.reserve(g.row_ptr[n]);
  g.val.reserve(g.row_ptr[n]);
  for (int i = 0; i < n; ++i)
    for (auto& [j, v] : rows[i]) {
      g.col.push_back(j);
      g.val.push_back(v);
    }
  return g;
}

void Generator::mul_left(const std::vector<double>& v,
                         std::vector<double>& out) const {
  out.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    double vi = v[i];
    if (vi == 0.0) continue;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out[col[k]] += vi * val[k];
  }
}

double Generator::max_exit_rate() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) m = std::max(m, -val[k]);
  return m;
}

std::vector<double> generator_stationary_levels(const ModelParams& p) {
  Generator g = build_generator(p);
  const int n = g.dim;
  // Left null vector of Q == kernel of Q^T. The chain has a single
  // recurrent class for every stochastic C (states outside it get 0), so
  // the kernel is one-dimensional.
  Eigen::MatrixXd qt = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k)
      qt(g.col[k], i) = g.val[k];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(qt);
  Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() < 1)
    throw std::runtime_error("generator stationary: empty null space");
  Eigen::VectorXd pi = ker.col(0);
  double total = pi.sum();
  if (total == 0.0)
    throw std::runtime_error("generator stationary: degenerate null vector");
  pi /= total;
  std::vector<double> levels(p.capacity + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    ChainState s = state_at(p, i);
    double v = pi(i);
    if (v < 0.0 && v > -1e-10) v = 0.0;
    levels[s.level] += v;
  }
  return levels;
}

}  // namespace espider::chain
