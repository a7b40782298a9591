#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "densigraph/model.hpp"
#include "densigraph/random.hpp"

namespace densigraph {

/// Space-time coordinate (site index, time). Times may be negative.
struct Site {
  std::size_t i;
  std::int64_t t;
  friend bool operator==(const Site&, const Site&) = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(s.t) * 0x9E3779B97F4A7C15ULL ^
                                      s.i);
  }
};

/// Randomness attached to one space-time site.
///
/// With probability lambda the site regenerates (`neighbour` empty) and takes
/// the value `xi` ~ Bernoulli(beta); otherwise it copies from `neighbour`,
/// chosen uniformly among all N sites, one step in the past.
struct SiteDraw {
  std::optional<std::size_t> neighbour;
  bool xi = false;

  bool regenerates() const { return !neighbour.has_value(); }
};

/// Pure function of (seed, i, t) given lambda, beta and N.
SiteDraw site_draw(Seed seed, const ModelParams& params, Site site);

class DepthExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ceil(ln(1e-12) / ln(1 - lambda)); 1 when lambda == 1.
std::size_t default_max_depth(double lambda);

struct BackwardWalk {
  Site start;
  std::vector<Site> path;  // start first, times strictly decreasing by one
  std::int64_t regen_time = 0;
  std::size_t regen_site = 0;
  bool regen_value = false;
};

/// Follows neighbour choices backward from z until the first regeneration.
BackwardWalk backward_walk(Seed seed, const ModelParams& params, Site z, std::size_t max_depth);

/// Lazily resolves stationary values X(i, t) from the keyed site draws,
/// memoizing every site it touches.
class PerfectSampler {
 public:
  /// max_depth == 0 selects default_max_depth(lambda).
  PerfectSampler(const Environment& env, const ModelParams& params, Seed seed,
                 std::size_t max_depth = 0);

  bool value(std::size_t i, std::int64_t t);
  std::size_t resolved_sites() const { return memo_.size(); }

 private:
  const Environment& env_;
  ModelParams params_;
  Seed seed_;
  std::size_t max_depth_;
  std::unordered_map<Site, bool, SiteHash> memo_;
  std::vector<std::pair<Site, std::size_t>> chain_;
};

enum class ResolutionOrder { time_major, site_major };

/// Exact stationary sample on the window {sites} x {1..t_len}; column k of
/// the result is time k + 1.
Trajectory perfect_sample(const Environment& env, const ModelParams& params, std::size_t t_len,
                          Seed seed, std::size_t max_depth = 0,
                          ResolutionOrder order = ResolutionOrder::time_major);

}  // namespace densigraph
