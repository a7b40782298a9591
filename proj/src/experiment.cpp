#include "densigraph/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "densigraph/forward_sim.hpp"
#include "densigraph/io.hpp"
#include "densigraph/perfect_sampler.hpp"

namespace densigraph {

std::size_t DeltaSpec::resolve(std::size_t t_len) const {
  switch (kind) {
    case Kind::one:
      return 1;
    case Kind::log:
      return default_delta(t_len, DeltaMode::log);
    case Kind::fixed:
      return value;
  }
  return 1;
}

std::string DeltaSpec::str() const {
  switch (kind) {
    case Kind::one:
      return "one";
    case Kind::log:
      return "log";
    case Kind::fixed:
      return std::to_string(value);
  }
  return "one";
}

std::vector<double> ExperimentConfig::varied_values() const {
  if (vary) return vary->values;
  return {std::numeric_limits<double>::quiet_NaN()};
}

ModelParams ExperimentConfig::params_for(double varied_value) const {
  ModelParams out = params;
  if (!vary) return out;
  const double beta = params.beta();
  const std::string& name = vary->name;
  if (name == "n") {
    out.n = static_cast<std::size_t>(std::llround(varied_value));
  } else if (name == "r_plus") {
    out.r_plus = varied_value;
  } else if (name == "beta") {
    out.mu = varied_value * out.lambda;
  } else if (name == "lambda") {
    out.lambda = varied_value;
    out.mu = beta * varied_value;
  } else if (name == "p") {
    out.p = varied_value;
  } else {
    throw ConfigError("cannot vary '" + name + "'");
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (t_grid.empty()) throw ConfigError("t_grid must not be empty");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 4) throw ConfigError("every T in t_grid must be >= 4");
    if (k > 0 && t_grid[k] <= t_grid[k - 1]) throw ConfigError("t_grid must be strictly ascending");
  }
  if (n_simu == 0) throw ConfigError("n_simu must be >= 1");
  if (delta.kind == DeltaSpec::Kind::fixed && delta.value == 0)
    throw ConfigError("delta must be positive");
  if (vary && vary->values.empty()) throw ConfigError("vary needs at least one value");
  for (double v : varied_values()) {
    const ModelParams p = params_for(v);
    if (!p.valid_relaxed() || !(p.lambda > 0.0))
      throw ConfigError("invalid model parameters for varied value " + format_double(v));
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    const auto out = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::size_t>(out);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<std::string, std::string> split_pair(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
  ExperimentConfig cfg;
  double beta = cfg.params.beta();
  std::optional<double> mu;
  std::optional<std::string> vary_name;
  std::vector<double> vary_values;

  for (const auto& [key, value] : pairs) {
    if (key == "n") {
      cfg.params.n = to_size(key, value);
    } else if (key == "r_plus") {
      cfg.params.r_plus = to_double(key, value);
    } else if (key == "beta") {
      beta = to_double(key, value);
    } else if (key == "mu") {
      mu = to_double(key, value);
    } else if (key == "lambda") {
      cfg.params.lambda = to_double(key, value);
    } else if (key == "p") {
      cfg.params.p = to_double(key, value);
    } else if (key == "t_grid") {
      cfg.t_grid.clear();
      for (const auto& item : split_list(value)) cfg.t_grid.push_back(to_size(key, item));
    } else if (key == "n_simu") {
      cfg.n_simu = to_size(key, value);
    } else if (key == "delta") {
      if (value == "one") {
        cfg.delta = {DeltaSpec::Kind::one, 1};
      } else if (value == "log") {
        cfg.delta = {DeltaSpec::Kind::log, 0};
      } else {
        cfg.delta = {DeltaSpec::Kind::fixed, to_size(key, value)};
      }
    } else if (key == "sampler") {
      if (value == "forward")
        cfg.sampler = SamplerKind::forward;
      else if (value == "perfect")
        cfg.sampler = SamplerKind::perfect;
      else
        throw ConfigError("sampler must be forward or perfect, got '" + value + "'");
    } else if (key == "seed") {
      cfg.master_seed = to_size(key, value);
    } else if (key == "vary") {
      if (!value.empty() && value != "none") vary_name = value;
    } else if (key == "values") {
      for (const auto& item : split_list(value)) vary_values.push_back(to_double(key, item));
    } else if (key == "compute_limits") {
      cfg.compute_limits = to_bool(key, value);
    } else if (key == "max_depth") {
      cfg.max_depth = to_size(key, value);
    } else if (key == "burnin") {
      if (value != "auto") cfg.burnin = to_size(key, value);
    } else if (key == "threads") {
      cfg.threads = to_size(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.params.mu = mu ? *mu : beta * cfg.params.lambda;
  if (vary_name) {
    static const char* kVariable[] = {"n", "r_plus", "beta", "lambda", "p"};
    if (std::find(std::begin(kVariable), std::end(kVariable), *vary_name) == std::end(kVariable))
      throw ConfigError("cannot vary '" + *vary_name + "'");
    cfg.vary = VarySpec{*vary_name, vary_values};
  } else if (!vary_values.empty()) {
    throw ConfigError("'values' given without 'vary'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(std::istream& is, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> pairs;
  std::string line;
  while (std::getline(is, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto [k, v] = split_pair(line);
    pairs[k] = v;
  }
  for (const auto& item : overrides) {
    auto [k, v] = split_pair(item);
    pairs[k] = v;
  }
  return config_from_pairs(pairs);
}

namespace {

struct ReplicaOutput {
  std::vector<ResultRow> rows;  // one per T, in t_grid order
};

ReplicaOutput run_replica(const ExperimentConfig& cfg, std::size_t value_index, double value,
                          std::size_t replica) {
  const ModelParams params = cfg.params_for(value);
  const Seed replica_seed =
      derive_seed(cfg.master_seed, streams::replica, (std::uint64_t{value_index} << 32) | replica);
  const Environment env =
      sample_environment(params, derive_seed(replica_seed, streams::environment, 0));
  const std::size_t t_max = cfg.t_grid.back();

  Trajectory traj;
  if (cfg.sampler == SamplerKind::forward) {
    const std::size_t burnin = cfg.burnin ? *cfg.burnin : default_burnin(params.lambda);
    traj = simulate(env, params, BitVector(params.n), t_max, burnin,
                    derive_seed(replica_seed, streams::dynamics, 0));
  } else {
    traj = perfect_sample(env, params, t_max, derive_seed(replica_seed, streams::dynamics, 1),
                          cfg.max_depth);
  }

  std::optional<TheoreticalLimits> lim;
  std::optional<InversionResult> lim_est;
  if (cfg.compute_limits) {
    lim = limits(env, params);
    lim_est = invert(LimitTriple{lim->m_inf, lim->v_inf, lim->w_inf}, params.r_plus);
  }

  ReplicaOutput out;
  for (std::size_t t : cfg.t_grid) {
    ResultRow row;
    row.vary = cfg.vary ? cfg.vary->name : std::string{};
    row.value = value;
    row.t = t;
    row.replica = replica + 1;
    row.limits = lim;
    row.limit_estimate = lim_est;
    try {
      row.moments = estimate_all(t == t_max ? traj : traj.prefix(t), cfg.delta.resolve(t));
      row.estimate = invert(row.moments, params.r_plus);
      if (!row.estimate.ok()) row.failure = row.estimate.failure;
    } catch (const std::exception& e) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      row.failure = e.what();
      row.moments.m_hat = row.moments.v_hat = row.moments.w_hat = nan;
      row.estimate.mu = row.estimate.lambda = row.estimate.p = nan;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<double> values = config.varied_values();
  const std::size_t jobs = values.size() * config.n_simu;
  std::vector<ReplicaOutput> outputs(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t vi = job / config.n_simu;
      try {
        outputs[job] = run_replica(config, vi, values[vi], job % config.n_simu);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<ResultRow> rows;
  rows.reserve(jobs * config.t_grid.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi)
    for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti)
      for (std::size_t r = 0; r < config.n_simu; ++r)
        rows.push_back(outputs[vi * config.n_simu + r].rows[ti]);
  return rows;
}

namespace {

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string{}; }

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kResultHeader << '\n';
  for (const auto& row : rows) {
    os << row.vary << ',' << (row.vary.empty() ? std::string{} : num(row.value)) << ',' << row.t
       << ',' << row.replica << ',';
    os << num(row.moments.m_hat) << ',' << num(row.moments.v_hat) << ','
       << num(row.moments.w_hat) << ',';
    if (row.failure) {
      os << ",,,,inversion_failed,";
    } else {
      os << num(row.estimate.mu) << ',' << num(row.estimate.lambda) << ',' << num(row.estimate.p)
         << ',' << to_string(row.estimate.branch) << ',' << row.estimate.guards.str() << ','
         << row.estimate.clipped.str();
    }
    if (row.limits) {
      os << ',' << num(row.limits->m_inf) << ',' << num(row.limits->v_inf) << ','
         << num(row.limits->w_inf);
    } else {
      os << ",,,";
    }
    if (row.limit_estimate && row.limit_estimate->ok()) {
      os << ',' << num(row.limit_estimate->mu) << ',' << num(row.limit_estimate->lambda) << ','
         << num(row.limit_estimate->p);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

constexpr const char* kEstimators[] = {"m", "v", "w", "mu", "lambda", "p"};

std::vector<SummaryEntry> summarize_group(const std::vector<const ResultRow*>& rows,
                                          const ModelParams& truth) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const LimitTriple exact = truth.admissible() ? forward_map(truth) : LimitTriple{nan, nan, nan};
  const double target[] = {exact.m, exact.v, exact.w, truth.mu, truth.lambda, truth.p};

  std::vector<std::size_t> ts;
  for (const auto* r : rows)
    if (std::find(ts.begin(), ts.end(), r->t) == ts.end()) ts.push_back(r->t);

  std::vector<SummaryEntry> out;
  const std::string vary = rows.front()->vary;
  const double value = rows.front()->value;
  for (std::size_t e = 0; e < 6; ++e) {
    for (std::size_t t : ts) {
      std::vector<double> errs;
      for (const auto* r : rows) {
        if (r->t != t || r->failure) continue;
        const double est[] = {r->moments.m_hat, r->moments.v_hat,   r->moments.w_hat,
                              r->estimate.mu,   r->estimate.lambda, r->estimate.p};
        errs.push_back(std::abs(est[e] - target[e]));
      }
      out.push_back({vary, value, kEstimators[e], t, median(errs), errs.size()});
    }
    // Limits are per environment: use one row per replica.
    std::vector<double> marks;
    for (const auto* r : rows) {
      if (r->t != ts.front() || !r->limits) continue;
      double est = nan;
      switch (e) {
        case 0: est = r->limits->m_inf; break;
        case 1: est = r->limits->v_inf; break;
        case 2: est = r->limits->w_inf; break;
        default:
          if (r->limit_estimate && r->limit_estimate->ok())
            est = e == 3 ? r->limit_estimate->mu
                         : (e == 4 ? r->limit_estimate->lambda : r->limit_estimate->p);
      }
      marks.push_back(std::abs(est - target[e]));
    }
    if (!marks.empty()) {
      const double med = median(marks);
      std::size_t finite = 0;
      for (double m : marks) finite += std::isfinite(m) ? 1 : 0;
      out.push_back({vary, value, kEstimators[e], std::nullopt, med, finite});
    }
  }
  return out;
}

template <typename TruthFn>
std::vector<SummaryEntry> summarize_by_value(const std::vector<ResultRow>& rows, TruthFn truth) {
  std::vector<double> order;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(order.begin(), order.end(), [&](double v) {
      return v == r.value || (std::isnan(v) && std::isnan(r.value));
    });
    if (it == order.end()) {
      order.push_back(r.value);
      groups.emplace_back();
      it = order.end() - 1;
    }
    groups[static_cast<std::size_t>(it - order.begin())].push_back(&r);
  }
  std::vector<SummaryEntry> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto part = summarize_group(groups[g], truth(order[g]));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

std::vector<SummaryEntry> summarize(const std::vector<ResultRow>& rows, const ModelParams& truth) {
  if (rows.empty()) throw InvalidArgument("summarize needs at least one row");
  return summarize_by_value(rows, [&](double) { return truth; });
}

std::vector<SummaryEntry> summarize(const std::vector<ResultRow>& rows,
                                    const ExperimentConfig& config) {
  if (rows.empty()) throw InvalidArgument("summarize needs at least one row");
  return summarize_by_value(rows, [&](double v) { return config.params_for(v); });
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryEntry>& entries) {
  os << "vary,value,estimator,T,median_abs_error,count\n";
  for (const auto& e : entries) {
    os << e.vary << ',' << (e.vary.empty() ? std::string{} : num(e.value)) << ',' << e.estimator
       << ',' << (e.t ? std::to_string(*e.t) : std::string("inf")) << ','
       << num(e.median_abs_error) << ',' << e.count << '\n';
  }
}

}  // namespace densigraph
