// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "densigraph/estimators.hpp"
#include "densigraph/experiment.hpp"
#include "densigraph/forward_sim.hpp"
#include "densigraph/inversion.hpp"
#include "densigraph/oracles.hpp"
#include "densigraph/perfect_sampler.hpp"
#include "densigraph/theory_limits.hpp"
#include "reference.hpp"

using namespace densigraph;

namespace {

constexpr Seed kMaster = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ModelParams uniform_admissible(Stream& s, double r_plus, std::size_t n = 100) {
  // Uniform on {0 < mu < lambda < 1} x (0, 1): order two uniforms.
  double a = s.uniform(), b = s.uniform(), p = s.uniform();
  while (a == 0.0 || b == 0.0 || a == b) {
    a = s.uniform();
    b = s.uniform();
  }
  while (p == 0.0) p = s.uniform();
  return ModelParams{std::min(a, b), std::max(a, b), p, r_plus, n};
}

double sup_error(const InversionResult& r, const ModelParams& p) {
  return std::max({std::abs(r.mu - p.mu), std::abs(r.lambda - p.lambda), std::abs(r.p - p.p)});
}

Outcome inversion_round_trip() {
  Stream s(kMaster, streams::trial);
  double worst = 0.0;
  std::size_t bad = 0, total = 0;
  for (double r : {0.5, 0.6, 0.75}) {
    for (int k = 0; k < 1000; ++k) {
      const ModelParams p = uniform_admissible(s, r);
      double err = INFINITY;
      try {
        err = sup_error(inverse_map(Branch::minus, forward_map(p), r), p);
      } catch (const NonInvertible&) {
      }
      if (std::isnan(err)) err = INFINITY;
      worst = std::max(worst, err);
      bad += err < 1e-10 ? 0 : 1;
      ++total;
    }
  }
  return {bad == 0, std::to_string(total) + " samples, max sup error " + fmt("%.3g", worst) +
                        ", " + std::to_string(bad) + " above 1e-10"};
}

Outcome two_branch_membership() {
  Stream s(kMaster + 1, streams::trial);
  const InversionTolerances tol;
  double worst = 0.0;
  std::size_t bad = 0, total = 0, skipped = 0;
  for (double r : {0.3, 0.4}) {
    int kept = 0;
    while (kept < 1000) {
      const ModelParams p = uniform_admissible(s, r);
      const LimitTriple t = forward_map(p);
      if (std::abs(kappa(t.m, t.w, r) - 4.0 * r * (1.0 - r)) < tol.degenerate_kappa) {
        ++skipped;
        continue;
      }
      double best = INFINITY;
      for (Branch a : {Branch::plus, Branch::minus}) {
        try {
          const double e = sup_error(inverse_map(a, t, r, tol), p);
          if (!std::isnan(e)) best = std::min(best, e);
        } catch (const NonInvertible&) {
        }
      }
      worst = std::max(worst, best);
      bad += best < 1e-10 ? 0 : 1;
      ++total;
      ++kept;
    }
  }
  return {bad == 0, std::to_string(total) + " samples (" + std::to_string(skipped) +
                        " degenerate-kappa draws skipped), max sup error " + fmt("%.3g", worst) +
                        ", " + std::to_string(bad) + " above 1e-10"};
}

const ModelParams kSmall{0.25, 0.5, 0.5, 2.0 / 3.0, 3};

Outcome perfect_sampler_exactness() {
  const Environment env = sample_environment(kSmall, kMaster);
  const oracles::ExactDistribution pi = oracles::exact_stationary(env, kSmall);
  const std::size_t samples = 200000;
  oracles::ExactDistribution emp{std::vector<double>(8, 0.0)};
  for (std::size_t k = 0; k < samples; ++k) {
    const Trajectory col =
        perfect_sample(env, kSmall, 1, derive_seed(kMaster, streams::trial, k));
    emp.probs[oracles::encode_state(col.column(0))] += 1.0 / static_cast<double>(samples);
  }
  const double tv = oracles::tv_distance(emp, pi);
  return {tv < 0.01, "TV distance " + fmt("%.5f", tv) + " (< 0.01), " +
                         std::to_string(env.edge_count()) + " edges"};
}

Outcome kernel_fidelity() {
  const Environment env = sample_environment(kSmall, kMaster);
  const std::size_t t_len = 100000;
  const Trajectory traj = simulate(env, kSmall, BitVector(3), t_len, default_burnin(kSmall.lambda),
                                   derive_seed(kMaster, streams::dynamics, 0));
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> counts;
  for (std::size_t t = 0; t + 1 < t_len; ++t) {
    const std::size_t state = oracles::encode_state(traj.column(t));
    for (std::size_t i = 0; i < 3; ++i) {
      auto& c = counts[{state, i}];
      c.first += traj.at(i, t + 1) ? 1.0 : 0.0;
      c.second += 1.0;
    }
  }
  std::size_t checked = 0, bad = 0;
  double worst_z = 0.0;
  for (const auto& [key, c] : counts) {
    if (c.second < 500) continue;
    BitVector x(3);
    for (std::size_t j = 0; j < 3; ++j) x.set(j, (key.first >> j) & 1U);
    const double p = transition_probability(env, kSmall, x, key.second);
    const double sigma = std::sqrt(p * (1.0 - p) / c.second);
    const double dev = std::abs(c.first / c.second - p);
    const double z = sigma > 0.0 ? dev / sigma : (dev == 0.0 ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    bad += z <= 3.0 ? 0 : 1;
    ++checked;
  }
  return {bad == 0 && checked > 0, std::to_string(checked) + " (state, site) pairs, max |z| " +
                                       fmt("%.2f", worst_z) + ", " + std::to_string(bad) +
                                       " beyond 3 sigma"};
}

Outcome coalescence_bound() {
  const ModelParams params{0.25, 0.5, 0.5, 0.5, 10};
  bool ok = true;
  std::ostringstream os;
  for (std::int64_t lag : {0, 1, 2, 4}) {
    const oracles::McEstimate e = oracles::coalescence_probability_mc(
        params, Site{0, lag}, Site{1, 0}, 100000, derive_seed(kMaster, streams::trial, lag));
    const double bound = oracles::coalescence_bound(params.lambda, params.n, lag);
    const bool pass = e.estimate <= bound + 3.0 * e.std_err;
    ok = ok && pass;
    os << (lag == 0 ? "" : "; ") << "lag " << lag << ": " << fmt("%.4f", e.estimate)
       << " <= " << fmt("%.4f", bound) << " + 3*" << fmt("%.4f", e.std_err);
  }
  return {ok, os.str()};
}

ExperimentConfig reduced_defaults() {
  ExperimentConfig cfg;
  cfg.params = ModelParams{0.25, 0.5, 0.5, 0.5, 100};
  cfg.t_grid = {250, 500, 1000, 2000};
  cfg.n_simu = 50;
  cfg.delta = DeltaSpec{DeltaSpec::Kind::one, 1};
  cfg.master_seed = kMaster;
  return cfg;
}

std::string reduced_csv;

Outcome estimator_consistency() {
  const ExperimentConfig cfg = reduced_defaults();
  const auto rows = run_experiment(cfg);
  std::ostringstream os;
  write_rows_csv(os, rows);
  reduced_csv = os.str();
  const auto summary = summarize(rows, cfg.params);
  auto lookup = [&](const char* est, std::size_t t) {
    for (const auto& e : summary)
      if (e.estimator == est && e.t == std::optional<std::size_t>{t}) return e.median_abs_error;
    return std::nan("");
  };
  const double m2000 = lookup("m", 2000), p2000 = lookup("p", 2000), p250 = lookup("p", 250);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failure ? 1 : 0;
  const bool ok = m2000 < 0.01 && p2000 < 0.25 && p2000 < p250;
  return {ok, "median |m_hat - m| at T=2000 " + fmt("%.5f", m2000) + " (< 0.01); median |p_hat - p| " +
                  fmt("%.4f", p2000) + " at T=2000 (< 0.25) vs " + fmt("%.4f", p250) +
                  " at T=250; " + std::to_string(failed) + " failed rows"};
}

Outcome limit_accuracy() {
  const ModelParams params{0.25, 0.5, 0.5, 0.5, 500};
  std::vector<double> errs;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Environment env =
        sample_environment(params, derive_seed(kMaster, streams::environment, k));
    const InversionResult r = limit_inversion(env, params, params.r_plus);
    errs.push_back(r.ok() ? std::abs(r.p - params.p) : NAN);
  }
  const double med = median(errs);
  return {med < 0.05, "median |p_inf - p| over 50 environments " + fmt("%.5f", med) + " (< 0.05)"};
}

Outcome quenched_rate() {
  std::vector<double> meds;
  std::ostringstream os;
  for (std::size_t n : {100, 200, 400}) {
    const ModelParams params{0.25, 0.5, 0.5, 0.5, n};
    const double m = forward_map(params).m;
    std::vector<double> errs;
    for (std::uint64_t k = 0; k < 30; ++k) {
      const Environment env =
          sample_environment(params, derive_seed(kMaster + n, streams::environment, k));
      errs.push_back(std::abs(limits(env, params).m_inf - m));
    }
    meds.push_back(median(errs));
    os << "N=" << n << ": " << fmt("%.3g", meds.back()) << "; ";
  }
  bool ok = true;
  for (std::size_t k = 0; k + 1 < meds.size(); ++k) {
    const double ratio = meds[k + 1] / meds[k];
    ok = ok && ratio >= 0.3 && ratio <= 0.8;
    os << "ratio " << fmt("%.3f", ratio) << (k + 2 < meds.size() ? ", " : "");
  }
  return {ok, os.str() + " (each in [0.3, 0.8])"};
}

Outcome estimator_exactness() {
  Stream s(kMaster, streams::mixture);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(s.uniform() * 20);
    const std::size_t t_len = 4 + static_cast<std::size_t>(s.uniform() * 47);
    const double density = s.uniform();
    ref::Rows rows(n, std::vector<int>(t_len));
    for (auto& row : rows)
      for (int& v : row) v = s.bernoulli(density) ? 1 : 0;
    const std::size_t max_delta = (t_len / 2) / 2;
    const std::size_t delta = 1 + static_cast<std::size_t>(s.uniform() * max_delta);
    const Trajectory traj = Trajectory::from_rows(rows);
    const MomentEstimates e = estimate_all(traj, delta);
    worst = std::max({worst, std::abs(e.m_hat - ref::mean(rows)),
                      std::abs(e.v_hat - ref::spatial_variance(rows)),
                      std::abs(e.w_delta - ref::w_delta(rows, delta)),
                      std::abs(w_delta(traj, 1) - ref::w_delta(rows, 1)),
                      std::abs(e.w_hat - ref::temporal_variance(rows, delta))});
  }
  return {worst <= 1e-12, "100 trajectories, max abs deviation " + fmt("%.3g", worst) + " (<= 1e-12)"};
}

Outcome mixture_unbiasedness() {
  const std::size_t n = 50, t_len = 100, reps = 100000;
  const double p = 0.5, kappa = 0.2;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    const double v = oracles::binomial_mixture_shat(
        oracles::sample_binomial_mixture(n, t_len, p, kappa,
                                         derive_seed(kMaster, streams::mixture, k)),
        t_len, kappa);
    sum += v;
    sum_sq += v * v;
  }
  const double r = static_cast<double>(reps);
  const double mean = sum / r;
  const double se = std::sqrt((sum_sq / r - mean * mean) / r);
  return {std::abs(mean - 2.0) <= 3.0 * se,
          "mean S_hat " + fmt("%.4f", mean) + ", |mean - 2| = " + fmt("%.4f", std::abs(mean - 2.0)) +
              " vs 3 sigma = " + fmt("%.4f", 3.0 * se)};
}

Outcome determinism() {
  const auto rows = run_experiment(reduced_defaults());
  std::ostringstream os;
  write_rows_csv(os, rows);
  const bool same = !reduced_csv.empty() && os.str() == reduced_csv;
  return {same, std::to_string(os.str().size()) + " bytes, " +
                    (same ? "byte-identical to the first run" : "differs from the first run")};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "inversion round trip, r+ >= 1/2", 1.0, inversion_round_trip},
      {2, "two-branch membership, r+ < 1/2", 1.0, two_branch_membership},
      {3, "perfect-sampler exactness", 30.0, perfect_sampler_exactness},
      {4, "Markov-kernel fidelity", 10.0, kernel_fidelity},
      {5, "coalescence bound", 30.0, coalescence_bound},
      {6, "estimator consistency, reduced defaults", 300.0, estimator_consistency},
      {7, "limit-estimator accuracy", 120.0, limit_accuracy},
      {8, "quenched-limit rate", 120.0, quenched_rate},
      {9, "estimator formula exactness", 1.0, estimator_exactness},
      {10, "binomial-mixture unbiasedness", 60.0, mixture_unbiasedness},
      {11, "determinism", 300.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d %s  %s: %s [%.2f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
