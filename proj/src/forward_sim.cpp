#include "densigraph/forward_sim.hpp"

#include <cmath>

namespace densigraph {

BitVector step(const Environment& env, const ModelParams& params, const BitVector& x,
               Stream& stream) {
  BitVector next(env.n());
  for (std::size_t i = 0; i < env.n(); ++i)
    if (stream.bernoulli(transition_probability(env, params, x, i))) next.set(i, true);
  return next;
}

std::size_t default_burnin(double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("burn-in needs lambda > 0");
  if (lambda >= 1.0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log1p(-lambda)));
}

Trajectory simulate(const Environment& env, const ModelParams& params, const BitVector& x0,
                    std::size_t t_len, std::size_t burnin, Seed seed) {
  params.require_relaxed();
  if (t_len == 0) throw InvalidArgument("simulate needs t_len >= 1");
  if (x0.size() != env.n()) throw InvalidArgument("initial configuration length differs from N");
  Stream stream(seed, streams::dynamics);
  BitVector x = x0;
  for (std::size_t s = 0; s < burnin; ++s) x = step(env, params, x, stream);
  Trajectory traj(env.n());
  for (std::size_t t = 0; t < t_len; ++t) {
    x = step(env, params, x, stream);
    traj.push_back(x);
  }
  return traj;
}

}  // namespace densigraph
