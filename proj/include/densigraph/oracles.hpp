#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "densigraph/model.hpp"
#include "densigraph/perfect_sampler.hpp"
#include "densigraph/random.hpp"

namespace densigraph {

/// Brute-force references for small systems and Monte-Carlo checks of the
/// coalescence and covariance bounds.
namespace oracles {

inline constexpr std::size_t kMaxExactSites = 12;

/// Law on {0,1}^N; state index bit i holds site i.
struct ExactDistribution {
  std::vector<double> probs;
};

/// One application of the transition kernel to a law on {0,1}^N.
ExactDistribution apply_kernel(const Environment& env, const ModelParams& params,
                               const ExactDistribution& dist);

/// Stationary law by power iteration until the sup-norm change is < 1e-13.
ExactDistribution exact_stationary(const Environment& env, const ModelParams& params);

/// Law of the configuration X_t encoded with the same bit convention.
std::size_t encode_state(const BitVector& x);

double tv_distance(const ExactDistribution& p, const ExactDistribution& q);

struct McEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
};

/// True when the two backward walks from z1 and z2, run on one shared field
/// of site draws, occupy the same site at the same time.
bool walks_coalesce(Seed seed, const ModelParams& params, Site z1, Site z2);

/// Fraction of `trials` independent fields on which z1 and z2 coalesce.
McEstimate coalescence_probability_mc(const ModelParams& params, Site z1, Site z2,
                                      std::size_t trials, Seed seed);

/// (1 - lambda)^(|t1 - t2| v 1) / ((1 - (1 - lambda)^2) N).
double coalescence_bound(double lambda, std::size_t n, std::int64_t lag);

/// cov(X_z1, X_z2) from independent perfect samples of the two sites.
McEstimate covariance_mc(const Environment& env, const ModelParams& params, Site z1, Site z2,
                         std::size_t samples, Seed seed);

/// Unbiased estimator of 1/p in the binomial-mixture toy model.
double binomial_mixture_shat(const std::vector<std::int64_t>& b, std::size_t t_len, double kappa);

/// N draws of B with theta ~ Bin(N, p) and B | theta ~ Bin(T, 1/2 + (kappa/p) theta / N).
std::vector<std::int64_t> sample_binomial_mixture(std::size_t n, std::size_t t_len, double p,
                                                  double kappa, Seed seed);

}  // namespace oracles
}  // namespace densigraph
