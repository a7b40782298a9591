#pragma once

#include <cstddef>

#include "densigraph/model.hpp"
#include "densigraph/random.hpp"

namespace densigraph {

/// One synchronous update. Site i consumes the i-th next draw of `stream`.
BitVector step(const Environment& env, const ModelParams& params, const BitVector& x,
               Stream& stream);

/// ceil(ln(1e-6) / ln(1 - lambda)); zero when lambda == 1.
std::size_t default_burnin(double lambda);

/// Runs `burnin` discarded steps from x0, then records t_len configurations.
Trajectory simulate(const Environment& env, const ModelParams& params, const BitVector& x0,
                    std::size_t t_len, std::size_t burnin, Seed seed);

}  // namespace densigraph
