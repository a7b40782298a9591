#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "densigraph/estimators.hpp"
#include "densigraph/experiment.hpp"
#include "densigraph/forward_sim.hpp"
#include "densigraph/inversion.hpp"
#include "densigraph/io.hpp"
#include "densigraph/oracles.hpp"
#include "densigraph/perfect_sampler.hpp"
#include "densigraph/theory_limits.hpp"

using namespace densigraph;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string{}; }

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::string summary;
  std::size_t threads = 0;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    auto in = open_in(a.config);
    cfg = parse_config(in, a.sets);
  } else {
    std::istringstream empty;
    cfg = parse_config(empty, a.sets);
  }
  if (a.threads != 0) cfg.threads = a.threads;

  const auto rows = run_experiment(cfg);
  if (a.out.empty() || a.out == "-") {
    write_rows_csv(std::cout, rows);
  } else {
    auto out = open_out(a.out);
    write_rows_csv(out, rows);
  }
  if (!a.summary.empty()) {
    auto out = open_out(a.summary);
    write_summary_csv(out, summarize(rows, cfg));
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failure ? 1 : 0;
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " rows failed inversion\n";
    return kExitPartial;
  }
  return 0;
}

struct EstimateArgs {
  std::string traj;
  std::string delta = "1";
  std::optional<std::size_t> n;
  std::optional<std::size_t> t_len;
};

int cmd_estimate(const EstimateArgs& a) {
  auto in = open_in(a.traj);
  const Trajectory traj = read_trajectory_csv(in, a.n, a.t_len);
  std::size_t delta = 1;
  if (a.delta == "log")
    delta = default_delta(traj.t_len(), DeltaMode::log);
  else if (a.delta != "one")
    delta = std::stoul(a.delta);
  const MomentEstimates est = estimate_all(traj, delta);
  std::cout << "m_hat,v_hat,w_hat,delta\n"
            << num(est.m_hat) << ',' << num(est.v_hat) << ',' << num(est.w_hat) << ','
            << est.delta << '\n';
  return 0;
}

struct InvertArgs {
  double m = 0, v = 0, w = 0, r_plus = 0.5;
};

int cmd_invert(const InvertArgs& a) {
  const InversionResult res = invert(LimitTriple{a.m, a.v, a.w}, a.r_plus);
  std::cout << "mu,lambda,p,branch,guards,clipped\n";
  if (!res.ok()) {
    std::cout << ",,,," << "inversion_failed" << ",\n";
    std::cerr << *res.failure << '\n';
    return kExitPartial;
  }
  std::cout << num(res.mu) << ',' << num(res.lambda) << ',' << num(res.p) << ','
            << to_string(res.branch) << ',' << res.guards.str() << ',' << res.clipped.str()
            << '\n';
  return 0;
}

struct LimitsArgs {
  std::string env;
  double mu = 0.25, lambda = 0.5;
};

ModelParams params_for_env(const Environment& env, double mu, double lambda) {
  const double n = static_cast<double>(env.n());
  return ModelParams{mu, lambda, env.p(), static_cast<double>(env.partition().size_plus()) / n,
                     env.n()};
}

int cmd_limits(const LimitsArgs& a) {
  auto in = open_in(a.env);
  const Environment env = read_environment(in);
  const ModelParams params = params_for_env(env, a.mu, a.lambda);
  const TheoreticalLimits lim = limits(env, params);
  std::cout << "m_inf,v_inf,w_inf\n"
            << num(lim.m_inf) << ',' << num(lim.v_inf) << ',' << num(lim.w_inf) << '\n';
  return 0;
}

struct SampleArgs {
  std::string sampler = "forward";
  std::size_t n = 100;
  double r_plus = 0.5, beta = 0.5, lambda = 0.5, p = 0.5;
  std::size_t t_len = 1000;
  Seed seed = 1;
  std::optional<Seed> env_seed;
  std::size_t max_depth = 0;
  std::optional<std::size_t> burnin;
  std::string dump_env, load_env, dump_traj;
  std::string delta = "1";
};

int cmd_sample(const SampleArgs& a) {
  ModelParams params{a.beta * a.lambda, a.lambda, a.p, a.r_plus, a.n};
  std::optional<Environment> env;
  if (!a.load_env.empty()) {
    auto in = open_in(a.load_env);
    env = read_environment(in);
    params = params_for_env(*env, a.beta * a.lambda, a.lambda);
  }
  params.require_relaxed();
  if (!env)
    env = sample_environment(params, a.env_seed ? *a.env_seed
                                                : derive_seed(a.seed, streams::environment, 0));
  if (!a.dump_env.empty()) {
    auto out = open_out(a.dump_env);
    write_environment(out, *env);
  }

  Trajectory traj;
  if (a.sampler == "forward") {
    traj = simulate(*env, params, BitVector(params.n), a.t_len,
                    a.burnin ? *a.burnin : default_burnin(params.lambda), a.seed);
  } else if (a.sampler == "perfect") {
    traj = perfect_sample(*env, params, a.t_len, a.seed, a.max_depth);
  } else {
    throw ConfigError("--sampler must be forward or perfect");
  }
  if (!a.dump_traj.empty()) {
    auto out = open_out(a.dump_traj);
    write_trajectory_csv(out, traj);
  }

  std::size_t delta = 1;
  if (a.delta == "log")
    delta = default_delta(traj.t_len(), DeltaMode::log);
  else if (a.delta != "one")
    delta = std::stoul(a.delta);
  const MomentEstimates est = estimate_all(traj, delta);
  std::cout << "m_hat,v_hat,w_hat,delta\n"
            << num(est.m_hat) << ',' << num(est.v_hat) << ',' << num(est.w_hat) << ','
            << est.delta << '\n';
  return 0;
}

struct OracleArgs {
  std::string name;
  std::string env;
  double mu = 0.25, lambda = 0.5, p = 0.5, kappa = 0.2;
  std::size_t n = 10, t_len = 100, trials = 10000;
  std::int64_t lag = 1;
  Seed seed = 1;
};

int cmd_oracle(const OracleArgs& a) {
  if (a.name == "stationary") {
    auto in = open_in(a.env);
    const Environment env = read_environment(in);
    const auto dist = oracles::exact_stationary(env, params_for_env(env, a.mu, a.lambda));
    std::cout << "state,prob\n";
    for (std::size_t s = 0; s < dist.probs.size(); ++s)
      std::cout << s << ',' << format_double(dist.probs[s]) << '\n';
  } else if (a.name == "coalescence") {
    const ModelParams params{0.5 * a.lambda, a.lambda, a.p, 0.5, a.n};
    const auto est = oracles::coalescence_probability_mc(params, Site{0, a.lag}, Site{1, 0},
                                                         a.trials, a.seed);
    std::cout << "estimate,std_err,bound\n"
              << format_double(est.estimate) << ',' << format_double(est.std_err) << ','
              << format_double(oracles::coalescence_bound(a.lambda, a.n, a.lag)) << '\n';
  } else if (a.name == "shat") {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < a.trials; ++k) {
      const auto b = oracles::sample_binomial_mixture(a.n, a.t_len, a.p, a.kappa,
                                                      derive_seed(a.seed, streams::trial, k));
      const double s = oracles::binomial_mixture_shat(b, a.t_len, a.kappa);
      sum += s;
      sum_sq += s * s;
    }
    const double n = static_cast<double>(a.trials);
    const double mean = sum / n;
    std::cout << "mean,std_err\n"
              << format_double(mean) << ','
              << format_double(std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n)) << '\n';
  } else {
    throw ConfigError("unknown oracle '" + a.name + "' (stationary, coalescence, shat)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field network dynamics: simulation, moment estimation, inversion"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a batch experiment and write the results CSV");
  run_cmd->add_option("--config", run.config, "key=value config file");
  run_cmd->add_option("--set", run.sets, "Override a config key (key=value)");
  run_cmd->add_option("--out", run.out, "Results CSV (default stdout)");
  run_cmd->add_option("--summary", run.summary, "Median-error summary CSV");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Moment estimates from a trajectory CSV");
  est_cmd->add_option("--traj", est.traj, "Trajectory CSV")->required();
  est_cmd->add_option("--delta", est.delta, "Block length: integer, one or log");
  est_cmd->add_option("--n", est.n, "Number of sites if the file has no header");
  est_cmd->add_option("--t-len", est.t_len, "Trajectory length if the file has no header");

  InvertArgs inv;
  auto* inv_cmd = app.add_subcommand("invert", "Recover (mu, lambda, p) from (m, v, w)");
  inv_cmd->add_option("--m", inv.m)->required();
  inv_cmd->add_option("--v", inv.v)->required();
  inv_cmd->add_option("--w", inv.w)->required();
  inv_cmd->add_option("--r-plus", inv.r_plus)->required();

  LimitsArgs lim;
  auto* lim_cmd = app.add_subcommand("limits", "Quenched limits (m_inf, v_inf, w_inf) of an environment");
  lim_cmd->add_option("--env", lim.env, "Environment file")->required();
  lim_cmd->add_option("--mu", lim.mu)->required();
  lim_cmd->add_option("--lambda", lim.lambda)->required();

  SampleArgs smp;
  auto* smp_cmd = app.add_subcommand("sample", "Draw one trajectory and print its moment estimates");
  smp_cmd->add_option("--sampler", smp.sampler)->check(CLI::IsMember({"forward", "perfect"}));
  smp_cmd->add_option("--n", smp.n);
  smp_cmd->add_option("--r-plus", smp.r_plus);
  smp_cmd->add_option("--beta", smp.beta);
  smp_cmd->add_option("--lambda", smp.lambda);
  smp_cmd->add_option("--p", smp.p);
  smp_cmd->add_option("--t-len", smp.t_len);
  smp_cmd->add_option("--seed", smp.seed);
  smp_cmd->add_option("--env-seed", smp.env_seed);
  smp_cmd->add_option("--max-depth", smp.max_depth, "Perfect sampler depth bound (0 = default)");
  smp_cmd->add_option("--burnin", smp.burnin, "Forward sampler burn-in");
  smp_cmd->add_option("--delta", smp.delta);
  smp_cmd->add_option("--dump-env", smp.dump_env);
  smp_cmd->add_option("--load-env", smp.load_env);
  smp_cmd->add_option("--dump-traj", smp.dump_traj);

  OracleArgs orc;
  auto* orc_cmd = app.add_subcommand("oracle", "");
  orc_cmd->group("");
  orc_cmd->add_option("name", orc.name)->required();
  orc_cmd->add_option("--env", orc.env);
  orc_cmd->add_option("--mu", orc.mu);
  orc_cmd->add_option("--lambda", orc.lambda);
  orc_cmd->add_option("--p", orc.p);
  orc_cmd->add_option("--kappa", orc.kappa);
  orc_cmd->add_option("--n", orc.n);
  orc_cmd->add_option("--t-len", orc.t_len);
  orc_cmd->add_option("--trials", orc.trials);
  orc_cmd->add_option("--lag", orc.lag);
  orc_cmd->add_option("--seed", orc.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*est_cmd) return cmd_estimate(est);
    if (*inv_cmd) return cmd_invert(inv);
    if (*lim_cmd) return cmd_limits(lim);
    if (*smp_cmd) return cmd_sample(smp);
    if (*orc_cmd) return cmd_oracle(orc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
