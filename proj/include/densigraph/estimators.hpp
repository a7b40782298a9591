#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "densigraph/model.hpp"

namespace densigraph {

/// Integer summaries a trajectory reduces to: per-site totals Z_{i,T} and the
/// population prefix counts N * Zbar_t for t = 0..T.
struct CountSummary {
  std::size_t n = 0;
  std::size_t t_len = 0;
  std::vector<std::int64_t> site_totals;
  std::vector<std::int64_t> prefix_counts;

  explicit CountSummary(const Trajectory& traj);

  double zbar(std::size_t t) const {
    return static_cast<double>(prefix_counts[t]) / static_cast<double>(n);
  }
};

/// m_hat = Zbar_T / T.
double spatio_temporal_mean(const Trajectory& traj);

/// v_hat = (T+1)N/T^3 [ mean_i Z_{i,T}^2 - T/(T+1) (Zbar_T + Zbar_T^2) ].
/// Can be negative on short samples.
double spatial_variance(const Trajectory& traj);

/// W_delta = N/T sum_{k <= floor(T/delta)} (Zbar_{k delta} - Zbar_{(k-1) delta} - delta m_hat)^2.
/// Trailing partial blocks are discarded. Requires 1 <= delta <= floor(T/2).
double w_delta(const Trajectory& traj, std::size_t delta);

/// w_hat = 2 W_{2 delta} - W_delta. Requires 1 <= 2 delta <= floor(T/2).
double temporal_variance(const Trajectory& traj, std::size_t delta);

enum class DeltaMode { one, log };

/// one -> 1; log -> max(1, floor(ln T)).
std::size_t default_delta(std::size_t t_len, DeltaMode mode);

struct MomentEstimates {
  double m_hat = 0.0;
  double v_hat = 0.0;
  double w_hat = 0.0;
  std::size_t delta = 1;
  double w_delta = 0.0;
  double w_2delta = 0.0;
};

MomentEstimates estimate_all(const Trajectory& traj, std::size_t delta);

}  // namespace densigraph
