#include "densigraph/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace densigraph {

CountSummary::CountSummary(const Trajectory& traj)
    : n(traj.n()), t_len(traj.t_len()), site_totals(traj.n(), 0), prefix_counts(traj.t_len() + 1, 0) {
  if (n == 0 || t_len == 0) throw InvalidArgument("empty trajectory");
  for (std::size_t t = 0; t < t_len; ++t) {
    const auto& col = traj.column(t);
    prefix_counts[t + 1] = prefix_counts[t] + static_cast<std::int64_t>(col.count());
    const auto words = col.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        site_totals[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))] += 1;
        bits &= bits - 1;
      }
    }
  }
}

namespace {

double m_hat_of(const CountSummary& c) { return c.zbar(c.t_len) / static_cast<double>(c.t_len); }

double v_hat_of(const CountSummary& c) {
  const double t = static_cast<double>(c.t_len);
  const double n = static_cast<double>(c.n);
  std::int64_t sum_sq = 0;
  for (auto z : c.site_totals) sum_sq += z * z;
  const double zbar = c.zbar(c.t_len);
  const double mean_sq = static_cast<double>(sum_sq) / n;
  return (t + 1.0) * n / (t * t * t) * (mean_sq - t / (t + 1.0) * (zbar + zbar * zbar));
}

double w_delta_of(const CountSummary& c, std::size_t delta) {
  if (delta < 1 || delta > c.t_len / 2)
    throw InvalidArgument("delta " + std::to_string(delta) + " outside [1, floor(T/2)] for T=" +
                          std::to_string(c.t_len));
  const double shift = static_cast<double>(delta) * m_hat_of(c);
  const std::size_t blocks = c.t_len / delta;
  double sum = 0.0;
  for (std::size_t k = 1; k <= blocks; ++k) {
    const double inc = c.zbar(k * delta) - c.zbar((k - 1) * delta) - shift;
    sum += inc * inc;
  }
  return static_cast<double>(c.n) / static_cast<double>(c.t_len) * sum;
}

void require_temporal_delta(const CountSummary& c, std::size_t delta) {
  if (delta < 1 || 2 * delta > c.t_len / 2)
    throw InvalidArgument("delta " + std::to_string(delta) +
                          " too large: temporal variance needs 2*delta <= floor(T/2), T=" +
                          std::to_string(c.t_len));
}

}  // namespace

double spatio_temporal_mean(const Trajectory& traj) { return m_hat_of(CountSummary(traj)); }

double spatial_variance(const Trajectory& traj) { return v_hat_of(CountSummary(traj)); }

double w_delta(const Trajectory& traj, std::size_t delta) {
  return w_delta_of(CountSummary(traj), delta);
}

double temporal_variance(const Trajectory& traj, std::size_t delta) {
  const CountSummary c(traj);
  require_temporal_delta(c, delta);
  return 2.0 * w_delta_of(c, 2 * delta) - w_delta_of(c, delta);
}

std::size_t default_delta(std::size_t t_len, DeltaMode mode) {
  if (t_len < 4) throw InvalidArgument("default_delta needs T >= 4");
  if (mode == DeltaMode::one) return 1;
  const auto d = static_cast<std::size_t>(std::floor(std::log(static_cast<double>(t_len))));
  return std::max<std::size_t>(1, d);
}

MomentEstimates estimate_all(const Trajectory& traj, std::size_t delta) {
  const CountSummary c(traj);
  require_temporal_delta(c, delta);
  MomentEstimates out;
  out.delta = delta;
  out.m_hat = m_hat_of(c);
  out.v_hat = v_hat_of(c);

  out.w_delta = w_delta_of(c, delta);
  out.w_2delta = w_delta_of(c, 2 * delta);
  out.w_hat = 2.0 * out.w_2delta - out.w_delta;
  return out;
}

}  // namespace densigraph
