#include "densigraph/theory_limits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace densigraph {

namespace {

std::size_t iteration_cap(double lambda, const SolverOptions& options) {
  if (options.max_iterations != 0) return options.max_iterations;
  if (lambda >= 1.0) return 10;
  return 10 * static_cast<std::size_t>(
                  std::ceil(std::log(options.tolerance) / std::log1p(-lambda)));
}

void check_inputs(const Environment& env, const ModelParams& params) {
  params.require_relaxed();
  if (!(params.lambda > 0.0)) throw InvalidArgument("linear solves need lambda > 0");
  if (params.n != env.n()) throw InvalidArgument("params.n differs from environment size");
}

template <typename Update>
std::vector<double> iterate(std::size_t n, double lambda, const SolverOptions& options,
                            std::vector<double> x, Update update) {
  const std::size_t cap = iteration_cap(lambda, options);
  for (std::size_t it = 0; it < cap; ++it) {
    std::vector<double> next = update(x);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - x[i]));
    x = std::move(next);
    if (change < options.tolerance) return x;
  }
  throw ConvergenceError("fixed-point iteration did not converge");
}

}  // namespace

std::vector<double> apply_signed(const Environment& env, const std::vector<double>& x) {
  const std::size_t n = env.n();
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = env.row(i);
    double acc = 0.0;
    for (std::size_t w = 0; w < row.size(); ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        acc += env.partition().excitatory(j) ? x[j] : -x[j];
        bits &= bits - 1;
      }
    }
    y[i] = acc * scale;
  }
  return y;
}

std::vector<double> apply_signed_transpose(const Environment& env, const std::vector<double>& x) {
  const std::size_t n = env.n();
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = env.row(i);
    for (std::size_t w = 0; w < row.size(); ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        acc[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))] += x[i];
        bits &= bits - 1;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    acc[j] *= env.partition().excitatory(j) ? scale : -scale;
  return acc;
}

std::vector<double> solve_m(const Environment& env, const ModelParams& params,
                            const SolverOptions& options) {
  check_inputs(env, params);
  const std::size_t n = env.n();
  const double a = 1.0 - params.lambda;
  // L^- = A 1_{P-}: inhibitory sites enter as theta (1 - m_j).
  std::vector<double> minus_ones(n, 0.0);
  for (std::size_t j = env.partition().size_plus(); j < n; ++j) minus_ones[j] = 1.0;
  const std::vector<double> inhibitory_load = apply_signed(env, minus_ones);
  return iterate(n, params.lambda, options, std::vector<double>(n, params.mu),
                 [&](const std::vector<double>& m) {
                   std::vector<double> next = apply_signed(env, m);
                   for (std::size_t i = 0; i < n; ++i)
                     next[i] = params.mu + a * (next[i] - inhibitory_load[i]);
                   return next;
                 });
}

std::vector<double> solve_c(const Environment& env, const ModelParams& params,
                            const SolverOptions& options) {
  check_inputs(env, params);
  const std::size_t n = env.n();
  const double a = 1.0 - params.lambda;
  return iterate(n, params.lambda, options, std::vector<double>(n, 1.0),
                 [&](const std::vector<double>& c) {
                   std::vector<double> next = apply_signed_transpose(env, c);
                   for (auto& v : next) v = 1.0 + a * v;
                   return next;
                 });
}

EnvironmentSolution solve_environment(const Environment& env, const ModelParams& params,
                                      const SolverOptions& options) {
  return {solve_m(env, params, options), solve_c(env, params, options)};
}

TheoreticalLimits limits(const EnvironmentSolution& solution) {
  const auto& m = solution.m_vec;
  const auto& c = solution.c_vec;
  const double n = static_cast<double>(m.size());
  TheoreticalLimits out;
  for (double mi : m) out.m_inf += mi;
  out.m_inf /= n;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double dev = m[i] - out.m_inf;
    out.v_inf += dev * dev;
    out.w_inf += c[i] * c[i] * (m[i] - m[i] * m[i]);
  }
  out.w_inf /= n;
  return out;
}

TheoreticalLimits limits(const Environment& env, const ModelParams& params) {
  return limits(solve_environment(env, params));
}

InversionResult limit_inversion(const Environment& env, const ModelParams& params, double r_plus) {
  const TheoreticalLimits lim = limits(env, params);
  return invert(LimitTriple{lim.m_inf, lim.v_inf, lim.w_inf}, r_plus);
}

}  // namespace densigraph
