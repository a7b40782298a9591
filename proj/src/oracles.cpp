#include "densigraph/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace densigraph::oracles {

ExactDistribution apply_kernel(const Environment& env, const ModelParams& params,
                               const ExactDistribution& dist) {
  const std::size_t n = env.n();
  if (n > kMaxExactSites) throw InvalidArgument("exact kernel limited to N <= 12");
  const std::size_t states = std::size_t{1} << n;
  if (dist.probs.size() != states) throw InvalidArgument("distribution size differs from 2^N");

  ExactDistribution out{std::vector<double>(states, 0.0)};
  std::vector<double> row(states);
  std::vector<double> fire(n);
  for (std::size_t x = 0; x < states; ++x) {
    const double mass = dist.probs[x];
    if (mass == 0.0) continue;
    BitVector config(n);
    for (std::size_t i = 0; i < n; ++i) config.set(i, (x >> i) & 1U);
    for (std::size_t i = 0; i < n; ++i) fire[i] = transition_probability(env, params, config, i);
    // Product of per-site Bernoulli laws, built one site at a time.
    row[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t half = std::size_t{1} << i;
      for (std::size_t k = 0; k < half; ++k) {
        row[k + half] = row[k] * fire[i];
        row[k] *= 1.0 - fire[i];
      }
    }
    for (std::size_t y = 0; y < states; ++y) out.probs[y] += mass * row[y];
  }
  return out;
}

ExactDistribution exact_stationary(const Environment& env, const ModelParams& params) {
  params.require_relaxed();
  const std::size_t n = env.n();
  if (n > kMaxExactSites) throw InvalidArgument("exact_stationary limited to N <= 12");
  const std::size_t states = std::size_t{1} << n;
  ExactDistribution dist{std::vector<double>(states, 1.0 / static_cast<double>(states))};
  for (int it = 0; it < 1'000'000; ++it) {
    ExactDistribution next = apply_kernel(env, params, dist);
    double change = 0.0;
    for (std::size_t s = 0; s < states; ++s)
      change = std::max(change, std::abs(next.probs[s] - dist.probs[s]));
    dist = std::move(next);
    if (change < 1e-13) break;
  }
  double total = 0.0;
  for (double v : dist.probs) total += v;
  for (double& v : dist.probs) v /= total;
  return dist;
}

std::size_t encode_state(const BitVector& x) {
  if (x.size() > kMaxExactSites) throw InvalidArgument("state encoding limited to N <= 12");
  return x.size() == 0 ? 0 : static_cast<std::size_t>(x.words()[0]);
}

double tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  if (p.probs.size() != q.probs.size()) throw InvalidArgument("distribution lengths differ");
  double sum = 0.0;
  for (std::size_t s = 0; s < p.probs.size(); ++s) sum += std::abs(p.probs[s] - q.probs[s]);
  return 0.5 * sum;
}

bool walks_coalesce(Seed seed, const ModelParams& params, Site z1, Site z2) {
  const std::size_t depth = default_max_depth(params.lambda);
  const BackwardWalk a = backward_walk(seed, params, z1, depth);
  const BackwardWalk b = backward_walk(seed, params, z2, depth);
  // path[k] sits at time start.t - k.
  const std::int64_t lo = std::max(a.regen_time, b.regen_time);
  const std::int64_t hi = std::min(z1.t, z2.t);
  for (std::int64_t s = hi; s >= lo; --s) {
    const auto& sa = a.path[static_cast<std::size_t>(z1.t - s)];
    const auto& sb = b.path[static_cast<std::size_t>(z2.t - s)];
    if (sa.i == sb.i) return true;
  }
  return false;
}

McEstimate coalescence_probability_mc(const ModelParams& params, Site z1, Site z2,
                                      std::size_t trials, Seed seed) {
  if (z1 == z2) throw InvalidArgument("coalescence needs distinct sites");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k)
    if (walks_coalesce(derive_seed(seed, streams::trial, k), params, z1, z2)) ++hits;
  const double n = static_cast<double>(trials);
  const double est = static_cast<double>(hits) / n;
  return {est, std::sqrt(est * (1.0 - est) / n)};
}

double coalescence_bound(double lambda, std::size_t n, std::int64_t lag) {
  const double a = 1.0 - lambda;
  const auto exponent = std::max<std::int64_t>(std::abs(lag), 1);
  return std::pow(a, static_cast<double>(exponent)) / ((1.0 - a * a) * static_cast<double>(n));
}

McEstimate covariance_mc(const Environment& env, const ModelParams& params, Site z1, Site z2,
                         std::size_t samples, Seed seed) {
  if (samples < 2) throw InvalidArgument("covariance needs at least two samples");
  std::vector<double> xs(samples), ys(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    PerfectSampler sampler(env, params, derive_seed(seed, streams::trial, k));
    xs[k] = sampler.value(z1.i, z1.t) ? 1.0 : 0.0;
    ys[k] = sampler.value(z2.i, z2.t) ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(samples);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double prod = (xs[k] - mx) * (ys[k] - my);
    sum += prod;
    sum_sq += prod * prod;
  }
  const double cov = sum / (n - 1.0);
  const double mean_prod = sum / n;
  const double var_prod = std::max(0.0, sum_sq / n - mean_prod * mean_prod);
  return {cov, std::sqrt(var_prod / n)};
}

double binomial_mixture_shat(const std::vector<std::int64_t>& b, std::size_t t_len, double kappa) {
  if (t_len < 2) throw InvalidArgument("binomial mixture estimator needs T >= 2");
  if (!(kappa > 0.0 && kappa < 0.5)) throw InvalidArgument("kappa must lie in (0, 1/2)");
  if (b.empty()) throw InvalidArgument("no observations");
  const double t = static_cast<double>(t_len);
  const double n = static_cast<double>(b.size());
  const double m = 0.5 + kappa;
  double v_hat = 0.0;
  for (auto bi : b) {
    if (bi < 0 || bi > static_cast<std::int64_t>(t_len))
      throw InvalidArgument("observation outside [0, T]");
    const double dev = static_cast<double>(bi) - t * m;
    v_hat += dev * dev;
  }
  v_hat /= n;
  return n / (t * (t - 1.0) * kappa * kappa) * (v_hat - t * m * (1.0 - m)) + 1.0;
}

std::vector<std::int64_t> sample_binomial_mixture(std::size_t n, std::size_t t_len, double p,
                                                  double kappa, Seed seed) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  const double gamma = kappa / p;
  if (!(gamma > 0.0 && gamma < 0.5)) throw InvalidArgument("kappa / p must lie in (0, 1/2)");
  // <random> distributions are implementation-defined; this sampler only
  // feeds statistical checks, never byte-compared output.
  Stream stream(seed, streams::mixture);
  std::binomial_distribution<std::int64_t> degree(static_cast<std::int64_t>(n), p);
  std::vector<std::int64_t> out(n);
  for (auto& b : out) {
    const double theta = static_cast<double>(degree(stream));
    const double prob = 0.5 + gamma * theta / static_cast<double>(n);
    std::binomial_distribution<std::int64_t> count(static_cast<std::int64_t>(t_len), prob);
    b = count(stream);
  }
  return out;
}

}  // namespace densigraph::oracles
