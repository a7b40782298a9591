#include "densigraph/perfect_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace densigraph {

SiteDraw site_draw(Seed seed, const ModelParams& params, Site site) {
  const Block block =
      keyed_block(seed, streams::site_draw | static_cast<std::uint32_t>(site.i),
                  static_cast<std::uint64_t>(site.t));
  SiteDraw draw;
  const double u = to_unit(block.lo);
  if (u >= params.lambda) {
    const double scaled =
        (u - params.lambda) / (1.0 - params.lambda) * static_cast<double>(params.n);
    draw.neighbour = std::min(static_cast<std::size_t>(scaled), params.n - 1);
  }
  draw.xi = to_unit(block.hi) < params.beta();
  return draw;
}

std::size_t default_max_depth(double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("max depth needs lambda > 0");
  if (lambda >= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log1p(-lambda)));
}

BackwardWalk backward_walk(Seed seed, const ModelParams& params, Site z, std::size_t max_depth) {
  if (max_depth == 0) throw InvalidArgument("max_depth must be positive");
  BackwardWalk walk{z, {z}};
  Site cur = z;
  for (;;) {
    const SiteDraw draw = site_draw(seed, params, cur);
    if (draw.regenerates()) {
      walk.regen_time = cur.t;
      walk.regen_site = cur.i;
      walk.regen_value = draw.xi;
      return walk;
    }
    if (walk.path.size() >= max_depth)
      throw DepthExceeded("backward walk did not regenerate within " + std::to_string(max_depth) +
                          " steps");
    cur = Site{*draw.neighbour, cur.t - 1};
    walk.path.push_back(cur);
  }
}

PerfectSampler::PerfectSampler(const Environment& env, const ModelParams& params, Seed seed,
                               std::size_t max_depth)
    : env_(env), params_(params), seed_(seed) {
  params_.require_relaxed();
  if (params_.n != env.n()) throw InvalidArgument("params.n differs from environment size");
  if (!(params_.lambda > 0.0)) throw InvalidArgument("perfect sampling needs lambda > 0");
  max_depth_ = max_depth == 0 ? default_max_depth(params_.lambda) : max_depth;
}

bool PerfectSampler::value(std::size_t i, std::int64_t t) {
  if (i >= env_.n()) throw std::out_of_range("site index out of range");
  chain_.clear();
  Site cur{i, t};
  bool resolved;
  for (;;) {
    if (auto it = memo_.find(cur); it != memo_.end()) {
      resolved = it->second;
      break;
    }
    const SiteDraw draw = site_draw(seed_, params_, cur);
    if (draw.regenerates()) {
      resolved = draw.xi;
      memo_.emplace(cur, resolved);
      break;
    }
    const std::size_t j = *draw.neighbour;
    // An absent edge forces zero whatever the parent holds.
    if (!env_.edge(cur.i, j)) {
      resolved = false;
      memo_.emplace(cur, resolved);
      break;
    }
    chain_.emplace_back(cur, j);
    if (chain_.size() >= max_depth_)
      throw DepthExceeded("site resolution exceeded max depth " + std::to_string(max_depth_));
    cur = Site{j, cur.t - 1};
  }
  for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
    const auto& [site, j] = *it;
    resolved = env_.partition().excitatory(j) ? resolved : !resolved;
    memo_.emplace(site, resolved);
  }
  return resolved;
}

Trajectory perfect_sample(const Environment& env, const ModelParams& params, std::size_t t_len,
                          Seed seed, std::size_t max_depth, ResolutionOrder order) {
  if (t_len == 0) throw InvalidArgument("perfect_sample needs t_len >= 1");
  PerfectSampler sampler(env, params, seed, max_depth);
  const std::size_t n = env.n();
  std::vector<BitVector> columns(t_len, BitVector(n));
  auto resolve = [&](std::size_t i, std::size_t k) {
    if (sampler.value(i, static_cast<std::int64_t>(k) + 1)) columns[k].set(i, true);
  };
  if (order == ResolutionOrder::time_major) {
    for (std::size_t k = 0; k < t_len; ++k)
      for (std::size_t i = 0; i < n; ++i) resolve(i, k);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < t_len; ++k) resolve(i, k);
  }
  Trajectory traj(n);
  for (auto& col : columns) traj.push_back(std::move(col));
  return traj;
}

}  // namespace densigraph
