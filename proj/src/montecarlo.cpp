#include "espider/montecarlo.hpp"

#include "espider/numeric.hpp"
#include "espider/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace espider::mc {

ChainState Trajectory::state_at(double t) const {
  if (jump_times.empty() || t < 0.0)
    throw std::domain_error("Trajectory::state_at: empty path or t < 0");
  // Last epoch with jump_time <= t.
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - jump_times.begin()) - 1;
  return states[idx];
}

std::string Trajectory::serialize() const {
  std::string out;
  out.reserve(jump_times.size() * 24);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "seed=%llu\n",
                static_cast<unsigned long long>(seed));
  out += buf;
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %d %d\n", jump_times[i],
                  states[i].level, states[i].ray);
    out += buf;
  }
  return out;
}

Trajectory simulate_path(const ModelParams& p, double horizon,
                         const ChainState& init, std::uint64_t seed) {
  p.validate();
  if (!(horizon > 0.0)) throw std::domain_error("simulate_path: horizon > 0");
  const int N = p.capacity;
  SplitMix64 rng(seed);
  Trajectory tr;
  tr.seed = seed;
  tr.jump_times.push_back(0.0);
  tr.states.push_back(init);
  double t = 0.0;
  ChainState s = init;
  std::vector<double> row(p.rays);
  while (true) {
    double total;
    if (s.at_origin()) {
      total = p.lambda * N;
    } else if (s.level == N) {
      total = p.mu * 2.0 * N;
    } else {
      total = p.lambda * (N - s.level) + p.mu * (N + s.level);
    }
    t += rng.next_exponential(total);
    if (t > horizon) break;
    if (s.at_origin()) {
      for (int j = 1; j <= p.rays; ++j) row[j - 1] = p.switching.at(s.ray, j);
      int j = rng.next_categorical(row, p.rays, 1.0) + 1;
      s = ChainState::interior(1, j);
    } else {
      double up = s.level < N ? p.lambda * (N - s.level) : 0.0;
      bool go_up = rng.next_double() * total < up;
      if (go_up)
        s = ChainState::interior(s.level + 1, s.ray);
      else if (s.level == 1)
        s = ChainState::origin(s.ray);
      else
        s = ChainState::interior(s.level - 1, s.ray);
    }
    tr.jump_times.push_back(t);
    tr.states.push_back(s);
  }
  return tr;
}

namespace {

void fill_intervals(EstimateTable& e) {
  e.point.resize(e.counts.size());
  e.ci_low.resize(e.counts.size());
  e.ci_high.resize(e.counts.size());
  const double n = static_cast<double>(e.n_runs);
  for (std::size_t k = 0; k < e.counts.size(); ++k) {
    double ph = e.counts[k] / n;
    e.point[k] = ph;
    if (e.counts[k] == 0) {
      e.ci_low[k] = 0.0;
      e.ci_high[k] = 3.0 / n;  // rule of three
    } else if (e.counts[k] == e.n_runs) {
      e.ci_low[k] = 1.0 - 3.0 / n;
      e.ci_high[k] = 1.0;
    } else {
      double hw = 1.959963984540054 * std::sqrt(ph * (1.0 - ph) / n);
      e.ci_low[k] = std::max(0.0, ph - hw);
      e.ci_high[k] = std::min(1.0, ph + hw);
    }
  }
}

}  // namespace

std::vector<EstimateTable> estimate_pk_multi(const ModelParams& p,
                                             const std::vector<double>& times,
                                             long n_runs, std::uint64_t seed,
                                             const ChainState& init,
                                             bool by_ray) {
  if (n_runs < 1) throw std::domain_error("estimate_pk: n_runs >= 1");
  if (times.empty()) return {};
  const double horizon = *std::max_element(times.begin(), times.end());
  const int levels = p.capacity + 1;
  // Per-run sampled states, then a deterministic reduction.
  std::vector<int> sampled(static_cast<std::size_t>(n_runs) * times.size());
  std::vector<int> sampled_ray(by_ray ? sampled.size() : 0);
  num::parallel_for(static_cast<std::size_t>(n_runs), [&](std::size_t i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    const int N = p.capacity;
    ChainState s = init;
    double t = 0.0;
    std::size_t next_time = 0;
    std::vector<double> row(p.rays);
    // Inline Gillespie loop; records the state holding at each requested
    // time without materializing the whole trajectory.
    std::vector<double> sorted_times = times;
    std::sort(sorted_times.begin(), sorted_times.end());
    while (next_time < sorted_times.size()) {
      double total;
      if (s.at_origin())
        total = p.lambda * N;
      else if (s.level == N)
        total = p.mu * 2.0 * N;
      else
        total = p.lambda * (N - s.level) + p.mu * (N + s.level);
      double tnext = t + rng.next_exponential(total);
      while (next_time < sorted_times.size() && sorted_times[next_time] < tnext) {
        sampled[i * times.size() + next_time] = s.level;
        if (by_ray) sampled_ray[i * times.size() + next_time] = s.ray;
        ++next_time;
      }
      if (tnext > horizon && next_time >= sorted_times.size()) break;
      t = tnext;
      if (s.at_origin()) {
        for (int j = 1; j <= p.rays; ++j) row[j - 1] = p.switching.at(s.ray, j);
        int j = rng.next_categorical(row, p.rays, 1.0) + 1;
        s = ChainState::interior(1, j);
      } else {
        double up = s.level < N ? p.lambda * (N - s.level) : 0.0;
        if (rng.next_double() * total < up)
          s = ChainState::interior(s.level + 1, s.ray);
        else if (s.level == 1)
          s = ChainState::origin(s.ray);
        else
          s = ChainState::interior(s.level - 1, s.ray);
      }
    }
  });
  std::vector<double> sorted_times = times;
  std::sort(sorted_times.begin(), sorted_times.end());
  std::vector<EstimateTable> tables(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    EstimateTable& e = tables[ti];
    e.t = sorted_times[ti];
    e.n_runs = n_runs;
    e.seed = seed;
    e.counts.assign(levels, 0);
    if (by_ray) e.ray_counts.assign(static_cast<std::size_t>(levels) * p.rays, 0);
    for (long i = 0; i < n_runs; ++i) {
      std::size_t slot = static_cast<std::size_t>(i) * times.size() + ti;
      ++e.counts[sampled[slot]];
      if (by_ray)
        ++e.ray_counts[static_cast<std::size_t>(sampled[slot]) * p.rays +
                       (sampled_ray[slot] - 1)];
    }
    fill_intervals(e);
  }
  return tables;
}

EstimateTable estimate_pk(const ModelParams& p, double t, long n_runs,
                          std::uint64_t seed, const ChainState& init) {
  return estimate_pk_multi(p, {t}, n_runs, seed, init).front();
}

}  // namespace espider::mc
