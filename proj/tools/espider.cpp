// espider -- multi-type Ehrenfest chain on a star graph, its stationary
// and transient analysis, Monte-Carlo simulation, and the
// Ornstein-Uhlenbeck diffusion approximation on the spider.

#include "espider/acceptance.hpp"
#include "espider/compare.hpp"
#include "espider/diffusion.hpp"
#include "espider/io.hpp"
#include "espider/model.hpp"
#include "espider/montecarlo.hpp"
#include "espider/numeric.hpp"
#include "espider/stationary.hpp"
#include "espider/transient.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using espider::SignedLog;
using espider::chain::ChainState;
using espider::chain::ModelParams;
using nlohmann::json;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct Output {
  std::string path;    // empty = stdout
  std::string format;  // "csv" or "json"

  void write_table(const std::string& config_json,
                   const std::vector<std::string>& columns,
                   const std::vector<std::vector<std::string>>& rows) const {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      os = &file;
    }
    if (format == "json") {
      json j;
      j["version"] = espider::io::kVersion;
      j["config"] = json::parse(config_json);
      json data = json::array();
      for (const auto& row : rows) {
        json obj;
        for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
        data.push_back(obj);
      }
      j["data"] = data;
      *os << j.dump(2) << "\n";
    } else {
      espider::io::write_csv_header(*os, config_json, columns);
      for (const auto& row : rows) espider::io::write_csv_row(*os, row);
    }
  }
};

struct ModelFlags {
  double lambda = 1.0, mu = 1.0, p = 0.5;
  int N = 1, d = 1;
  std::string switch_kind = "uniform";
  std::string config_path;

  void attach(CLI::App* app) {
    app->add_option("--lambda", lambda, "up-rate factor");
    app->add_option("--mu", mu, "down-rate factor");
    app->add_option("--N", N, "capacity");
    app->add_option("--d", d, "number of rays");
    app->add_option("--switch", switch_kind,
                    "uniform|uniform-excl|cyclic|sequential|random-walk");
    app->add_option("--p", p, "random-walk upward probability");
    app->add_option("--config", config_path, "model config JSON file");
  }

  ModelParams resolve() const {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read config: " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      return ModelParams::from_json(ss.str());
    }
    ModelParams mp;
    mp.lambda = lambda;
    mp.mu = mu;
    mp.capacity = N;
    mp.rays = d;
    mp.switching = espider::chain::example_switch_matrix(
        espider::chain::switch_kind_from_string(switch_kind), d, p);
    mp.validate();
    return mp;
  }
};

std::string fmt(double v) { return espider::io::format_double(v); }
std::string fmt12(double v) { return espider::io::format_double(v, 12); }

int cmd_transient(const ModelFlags& mf, const std::string& t_list, double t_max,
                  int steps, const std::string& method, double z, double eta,
                  bool has_z, bool has_eta, const Output& out) {
  ModelParams mp = mf.resolve();
  json cfg = json::parse(mp.to_json());
  cfg["subcommand"] = "transient";

  if (has_eta) {
    std::printf("%.12g\n", espider::transient::laplace_H(eta, mp));
    return 0;
  }
  if (has_z) {
    std::vector<double> ts = t_list.empty() ? std::vector<double>{1.0}
                                            : parse_list(t_list);
    for (double t : ts)
      std::printf("%.12g\n", espider::transient::pgf_F(z, t, mp));
    return 0;
  }

  const bool symmetric =
      std::fabs(mp.lambda - mp.mu) <= 1e-12 * (mp.lambda + mp.mu);
  bool use_closed = method == "closed" || (method == "auto" && symmetric);
  if (use_closed && !symmetric)
    throw std::domain_error("closed-form transient requires lambda == mu");
  cfg["method"] = use_closed ? "closed" : "oracle";

  std::vector<double> ts;
  if (!t_list.empty())
    ts = parse_list(t_list);
  else
    for (int i = 0; i <= steps; ++i) ts.push_back(t_max * i / steps);
  std::vector<std::string> cols = {"t"};
  for (int k = 0; k <= mp.capacity; ++k) cols.push_back("p" + std::to_string(k));
  std::vector<std::vector<std::string>> rows;
  espider::transient::SpectralDecomposition sd;
  if (use_closed)
    sd = espider::transient::spectral_decomposition(mp.capacity, mp.mu);
  for (double t : ts) {
    std::vector<std::string> row = {fmt12(t)};
    if (use_closed) {
      row.push_back(fmt12(espider::transient::p0_closed(t, sd)));
      for (int k = 1; k <= mp.capacity; ++k)
        row.push_back(fmt12(espider::transient::pr_closed(k, t, sd)));
    } else {
      auto sol = espider::transient::transient_oracle(mp, t, ChainState::origin(1));
      for (double v : sol.level_probs) row.push_back(fmt12(v));
    }
    rows.push_back(std::move(row));
  }
  out.write_table(cfg.dump(), cols, rows);
  return 0;
}

int cmd_stationary(int N, const std::string& N_list, double rho, int k,
                   bool has_k, bool with_approx, bool moments_scan,
                   const Output& out) {
  json cfg = {{"subcommand", "stationary"}, {"N", N}, {"rho", rho}};
  if (has_k && out.path.empty()) {
    SignedLog v = espider::stat::rho_k(k, rho, N);
    std::printf("%.6g\n", v.to_double());
    return 0;
  }
  if (moments_scan) {
    std::vector<int> ns;
    if (N_list.empty())
      ns.push_back(N);
    else
      for (double v : parse_list(N_list)) ns.push_back(static_cast<int>(v));
    std::vector<std::string> cols = {"N", "mean", "var", "cv"};
    std::vector<std::vector<std::string>> rows;
    for (int n : ns) {
      espider::stat::Moments m = espider::stat::moments(rho, n);
      rows.push_back({std::to_string(n), fmt(m.mean), fmt(m.variance), fmt(m.cv)});
    }
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  bool approx_ok = with_approx && rho < 1.0;
  std::vector<std::string> cols = {"N",     "rho",          "k",
                                   "rho_k", "rho_k_approx", "log10_rho_k",
                                   "log10_rho_k_approx"};
  std::vector<std::vector<std::string>> rows;
  SignedLog ga, ge;
  if (approx_ok) {
    ga = espider::stat::g_approx(rho, N);
    ge = espider::stat::g(rho, N);
  }
  for (int kk = 0; kk <= N; ++kk) {
    if (has_k && kk != k) continue;
    SignedLog v = espider::stat::rho_k(kk, rho, N);
    std::vector<std::string> row = {std::to_string(N), fmt(rho),
                                    std::to_string(kk), fmt(v.to_double())};
    if (approx_ok) {
      SignedLog va = mul(v, div(ga, ge));
      row.push_back(fmt(va.to_double()));
      row.push_back(fmt(v.log10_mag()));
      row.push_back(fmt(va.log10_mag()));
    } else {
      row.push_back("");
      row.push_back(fmt(v.log10_mag()));
      row.push_back("");
    }
    rows.push_back(std::move(row));
  }
  out.write_table(cfg.dump(), cols, rows);
  return 0;
}

int cmd_entropy(int N, const std::string& N_list, double rho_min,
                double rho_max, int steps, bool argmax, const Output& out) {
  json cfg = {{"subcommand", "entropy"}, {"N", N}};
  if (argmax) {
    std::vector<int> ns;
    if (N_list.empty())
      ns.push_back(N);
    else
      for (double v : parse_list(N_list)) ns.push_back(static_cast<int>(v));
    if (out.path.empty() && ns.size() == 1) {
      espider::stat::EntropyArgmax am = espider::stat::entropy_argmax(ns[0]);
      if (am.candidates.size() == 1) {
        std::printf("%.4g\n", am.m);
        return 0;
      }
    }
    std::vector<std::string> cols = {"N", "m", "H", "candidates"};
    std::vector<std::vector<std::string>> rows;
    for (int n : ns) {
      espider::stat::EntropyArgmax am = espider::stat::entropy_argmax(n);
      std::string cand;
      for (double c : am.candidates) cand += (cand.empty() ? "" : ";") + fmt(c);
      rows.push_back({std::to_string(n), fmt(am.m), fmt(am.value), cand});
    }
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  std::vector<std::string> cols = {"rho", "entropy"};
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i <= steps; ++i) {
    double rho = rho_min + (rho_max - rho_min) * i / steps;
    rows.push_back({fmt(rho), fmt(espider::stat::entropy(rho, N))});
  }
  out.write_table(cfg.dump(), cols, rows);
  return 0;
}

int cmd_simulate(const ModelFlags& mf, const std::string& t_list, long runs,
                 std::uint64_t seed, const Output& out) {
  ModelParams mp = mf.resolve();
  std::vector<double> times = parse_list(t_list.empty() ? "1" : t_list);
  auto tables = espider::mc::estimate_pk_multi(mp, times, runs, seed,
                                               ChainState::origin(1));
  json cfg = json::parse(mp.to_json());
  cfg["subcommand"] = "simulate";
  cfg["runs"] = runs;
  cfg["seed"] = seed;
  cfg["times"] = times;
  std::vector<std::string> cols = {"t",       "level",  "point", "ci_low",
                                   "ci_high", "n_runs", "seed"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : tables)
    for (std::size_t k = 0; k < e.point.size(); ++k)
      rows.push_back({fmt(e.t), std::to_string(k), fmt(e.point[k]),
                      fmt(e.ci_low[k]), fmt(e.ci_high[k]),
                      std::to_string(e.n_runs), std::to_string(e.seed)});
  out.write_table(cfg.dump(), cols, rows);
  if (!out.path.empty()) {
    std::ofstream mf_out(out.path + ".manifest.json");
    cfg["ci_method"] = "normal approximation, rule-of-three at the endpoints";
    mf_out << cfg.dump(2) << "\n";
  }
  return 0;
}

int cmd_diffusion(double alpha, double gamma, double nu, double epsilon,
                  const std::string& mode, const std::string& switch_kind,
                  int d, double p, double horizon, double dt, double t_end,
                  double x_max, int cells, std::uint64_t seed, int bins,
                  const Output& out) {
  espider::diff::DiffusionParams dp =
      espider::diff::scale_params(alpha, gamma, nu, epsilon);
  json cfg = {{"subcommand", "diffusion"}, {"alpha", alpha},
              {"gamma", gamma},            {"nu", nu},
              {"epsilon", epsilon},        {"mode", mode},
              {"sigma2", dp.sigma2()},     {"beta", dp.beta()}};
  if (mode == "moments") {
    espider::diff::XMoments m = espider::diff::moments_X(dp);
    out.write_table(cfg.dump(), {"mean", "var"},
                    {{fmt(m.mean), fmt(m.variance)}});
    return 0;
  }
  if (mode == "density") {
    double s = std::sqrt(dp.sigma2() / (2.0 * alpha));
    double hi = x_max > 0 ? x_max : std::max(dp.beta(), 0.0) + 8.0 * s;
    std::vector<std::string> cols = {"x", "w"};
    std::vector<std::vector<std::string>> rows;
    int n = cells > 0 ? cells : 400;
    for (int i = 0; i <= n; ++i) {
      double x = hi * i / n;
      rows.push_back({fmt(x), fmt(espider::diff::stationary_density_w(x, dp))});
    }
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  if (mode == "sde") {
    espider::chain::SwitchMatrix C = espider::chain::example_switch_matrix(
        espider::chain::switch_kind_from_string(switch_kind), d, p);
    cfg["d"] = d;
    cfg["switch"] = switch_kind;
    cfg["horizon"] = horizon;
    cfg["dt"] = dt;
    cfg["seed"] = seed;
    double s = std::sqrt(dp.sigma2() / (2.0 * alpha));
    double hi = x_max > 0 ? x_max : std::max(dp.beta(), 0.0) + 6.0 * s;
    int nb = bins > 0 ? bins : 40;
    std::vector<std::vector<long>> hist(nb, std::vector<long>(d, 0));
    espider::diff::simulate_spider_ou(
        dp, C, horizon, dt, {0.0, 1}, seed,
        [&](double, const espider::diff::SpiderState& st, bool) {
          int b = static_cast<int>(st.x / hi * nb);
          if (b >= 0 && b < nb) ++hist[b][st.ray - 1];
        });
    std::vector<std::string> cols = {"x_bin", "count", "ray"};
    std::vector<std::vector<std::string>> rows;
    for (int b = 0; b < nb; ++b)
      for (int j = 0; j < d; ++j)
        rows.push_back({fmt((b + 0.5) * hi / nb), std::to_string(hist[b][j]),
                        std::to_string(j + 1)});
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  if (mode == "fp") {
    double s = std::sqrt(dp.sigma2() / (2.0 * alpha));
    espider::diff::FpGrid grid;
    grid.x_max = x_max > 0 ? x_max : std::max(dp.beta(), 0.0) + 10.0 * s;
    grid.n_cells = cells > 0 ? cells : 1000;
    cfg["t_end"] = t_end;
    cfg["x_max"] = grid.x_max;
    cfg["cells"] = grid.n_cells;
    std::vector<double> h0(grid.n_cells, 1.0 / grid.x_max);
    std::vector<double> h =
        espider::diff::fokker_planck_evolve(h0, dp, t_end, grid, dt);
    std::vector<std::string> cols = {"t", "x", "h"};
    std::vector<std::vector<std::string>> rows;
    double dx = grid.x_max / grid.n_cells;
    for (int i = 0; i < grid.n_cells; ++i)
      rows.push_back({fmt(t_end), fmt((i + 0.5) * dx), fmt(h[i])});
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  throw CLI::ValidationError("diffusion", "unknown mode: " + mode);
}

int cmd_compare(const std::string& what, bool check, const Output& out) {
  json cfg = {{"subcommand", "compare"}, {"table", what}, {"preset", "paper"}};
  if (what == "table1") {
    if (check) {
      espider::cmp::TableCheck tc = espider::cmp::check_table1(std::cerr);
      std::cerr << tc.checked - tc.missed << "/" << tc.checked
                << " consistent values match; " << tc.known_bad_missed << "/"
                << tc.known_bad
                << " known-inconsistent N=100 approximation values miss\n";
      return tc.all_ok() ? 0 : 1;
    }
    std::vector<std::string> cols = {"N",     "rho",        "k",
                                     "rho_k", "rho_k_approx", "delta",
                                     "log10_rho_k"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : espider::cmp::table1_preset()) {
      auto r = espider::cmp::table1({cell.N}, {cell.rho}, {cell.k}).front();
      rows.push_back({std::to_string(r.N), fmt(r.param), std::to_string(r.k),
                      fmt(r.exact.to_double()), fmt(r.approx.to_double()),
                      fmt(r.delta), fmt(r.exact.log10_mag())});
    }
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  if (what == "table3") {
    if (check) {
      espider::cmp::TableCheck tc = espider::cmp::check_table3(std::cerr);
      std::cerr << tc.checked - tc.missed << "/" << tc.checked
                << " values match\n";
      return tc.all_ok() ? 0 : 1;
    }
    std::vector<std::string> cols = {"N", "sigma2", "k", "w_eps", "rho_k",
                                     "delta"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : espider::cmp::table3_preset()) {
      auto r = espider::cmp::table3({cell.N}, 0.1, 1.0, {cell.k}).front();
      rows.push_back({std::to_string(r.N), fmt(r.param), std::to_string(r.k),
                      fmt(r.approx.to_double()), fmt(r.exact.to_double()),
                      fmt(r.delta)});
    }
    out.write_table(cfg.dump(), cols, rows);
    return 0;
  }
  if (what == "moments") {
    auto rep = espider::cmp::moment_agreement(10000, 0.1);
    std::vector<std::string> cols = {"N",          "mean_exact", "var_exact",
                                     "mean_ratio", "var_ratio",
                                     "mean_ratio_stirling", "var_ratio_stirling"};
    out.write_table(cfg.dump(), cols,
                    {{std::to_string(rep.N), fmt(rep.mean_exact),
                      fmt(rep.var_exact), fmt(rep.mean_ratio),
                      fmt(rep.var_ratio), fmt(rep.mean_ratio_stirling),
                      fmt(rep.var_ratio_stirling)}});
    return 0;
  }
  throw CLI::ValidationError("compare", "unknown table: " + what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-type Ehrenfest chain on a star graph and its "
               "Ornstein-Uhlenbeck spider approximation"};
  app.require_subcommand(1);
  app.fallthrough();  // --out/--format are shared by all subcommands

  Output out;
  app.add_option("--out", out.path, "output file (default stdout)");
  out.format = "csv";
  app.add_option("--format", out.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // transient
  auto* tr = app.add_subcommand("transient", "time-dependent law p(k,t)");
  ModelFlags tr_model;
  tr_model.attach(tr);
  std::string tr_times;
  double tr_tmax = 5.0, tr_z = 0.5, tr_eta = 1.0;
  int tr_steps = 100;
  std::string tr_method = "auto";
  tr->add_option("--t", tr_times, "comma-separated times");
  tr->add_option("--t-max", tr_tmax, "grid horizon");
  tr->add_option("--steps", tr_steps, "grid steps");
  tr->add_option("--method", tr_method, "auto|closed|oracle")
      ->check(CLI::IsMember({"auto", "closed", "oracle"}));
  auto* zopt = tr->add_option("--z", tr_z, "evaluate the PGF F(z,t)");
  auto* eopt = tr->add_option("--eta", tr_eta, "evaluate the Laplace transform");

  // stationary
  auto* st = app.add_subcommand("stationary", "stationary law rho(k)");
  int st_N = 10, st_k = 0;
  double st_rho = 1.0;
  bool st_approx = false, st_moments = false;
  std::string st_Nlist;
  st->add_option("--N", st_N, "capacity");
  st->add_option("--N-list", st_Nlist, "comma-separated capacities (moments)");
  st->add_option("--rho", st_rho, "rate ratio lambda/mu")->required();
  auto* kopt = st->add_option("--k", st_k, "single level");
  st->add_flag("--approx", st_approx, "include the large-N approximation");
  st->add_flag("--moments", st_moments, "emit mean/var/cv instead");

  // entropy
  auto* en = app.add_subcommand("entropy", "stationary entropy curves");
  int en_N = 10, en_steps = 200;
  double en_lo = 0.1, en_hi = 20.0;
  bool en_argmax = false;
  std::string en_Nlist;
  en->add_option("--N", en_N, "capacity");
  en->add_option("--N-list", en_Nlist, "comma-separated capacities (argmax)");
  en->add_option("--rho-min", en_lo, "");
  en->add_option("--rho-max", en_hi, "");
  en->add_option("--steps", en_steps, "");
  en->add_flag("--argmax", en_argmax, "report the maximizer");

  // simulate
  auto* si = app.add_subcommand("simulate", "Monte-Carlo estimation of p(k,t)");
  ModelFlags si_model;
  si_model.attach(si);
  std::string si_times = "1";
  long si_runs = 10000;
  std::uint64_t si_seed = 1;
  si->add_option("--t", si_times, "comma-separated sample times");
  si->add_option("--runs", si_runs, "independent runs");
  si->add_option("--seed", si_seed, "master seed");

  // diffusion
  auto* di = app.add_subcommand("diffusion", "OU-on-spider limit");
  double di_alpha = 2.0, di_gamma = 0.0, di_nu = 1.0, di_eps = 0.1;
  std::string di_mode = "density", di_switch = "uniform";
  int di_d = 1, di_cells = 0, di_bins = 0;
  double di_p = 0.5, di_horizon = 100.0, di_dt = 1e-3, di_tend = 5.0,
         di_xmax = 0.0;
  std::uint64_t di_seed = 1;
  di->add_option("--alpha", di_alpha, "relaxation rate");
  di->add_option("--gamma", di_gamma, "drift asymmetry");
  di->add_option("--nu", di_nu, "limit of N eps^2");
  di->add_option("--epsilon", di_eps, "lattice spacing");
  di->add_option("--mode", di_mode, "density|moments|sde|fp")
      ->check(CLI::IsMember({"density", "moments", "sde", "fp"}));
  di->add_option("--switch", di_switch, "switching scheme (sde mode)");
  di->add_option("--d", di_d, "rays (sde mode)");
  di->add_option("--p", di_p, "random-walk probability");
  di->add_option("--horizon", di_horizon, "sde horizon");
  di->add_option("--dt", di_dt, "time step");
  di->add_option("--t-end", di_tend, "fp end time");
  di->add_option("--x-max", di_xmax, "domain truncation");
  di->add_option("--cells", di_cells, "fp cells / density points");
  di->add_option("--bins", di_bins, "sde histogram bins");
  di->add_option("--seed", di_seed, "sde seed");

  // compare
  auto* co = app.add_subcommand("compare", "reference-table reproduction");
  std::string co_what = "table1";
  bool co_check = false;
  co->add_option("table", co_what, "table1|table3|moments")->required();
  co->add_flag("--check", co_check, "exit nonzero if any cell misses");

  // check
  auto* ch = app.add_subcommand("check", "run the acceptance preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (tr->parsed())
      return cmd_transient(tr_model, tr_times, tr_tmax, tr_steps, tr_method,
                           tr_z, tr_eta, zopt->count() > 0, eopt->count() > 0,
                           out);
    if (st->parsed())
      return cmd_stationary(st_N, st_Nlist, st_rho, st_k, kopt->count() > 0,
                            st_approx, st_moments, out);
    if (en->parsed())
      return cmd_entropy(en_N, en_Nlist, en_lo, en_hi, en_steps, en_argmax, out);
    if (si->parsed()) return cmd_simulate(si_model, si_times, si_runs, si_seed, out);
    if (di->parsed())
      return cmd_diffusion(di_alpha, di_gamma, di_nu, di_eps, di_mode,
                           di_switch, di_d, di_p, di_horizon, di_dt, di_tend,
                           di_xmax, di_cells, di_seed, di_bins, out);
    if (co->parsed()) return cmd_compare(co_what, co_check, out);
    if (ch->parsed()) {
      int failures = espider::accept::run_all(std::cout);
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
