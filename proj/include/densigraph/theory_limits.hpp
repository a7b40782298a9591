#pragma once

#include <stdexcept>
#include <vector>

#include "densigraph/inversion.hpp"
#include "densigraph/model.hpp"

namespace densigraph {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-site stationary means m^N and the column sums c^N of the resolvent
/// Q^N = (I - (1 - lambda) A^N)^{-1}, for one realized environment.
struct EnvironmentSolution {
  std::vector<double> m_vec;
  std::vector<double> c_vec;
};

struct TheoreticalLimits {
  double m_inf = 0.0;
  double v_inf = 0.0;
  double w_inf = 0.0;
};

/// Fixed-point (Neumann) iteration settings. max_iterations == 0 selects
/// 10 * ceil(ln(tolerance) / ln(1 - lambda)).
struct SolverOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 0;
};

/// y = A^N x, with A^N(i, j) = +-theta(i, j) / N signed by the population of j.
std::vector<double> apply_signed(const Environment& env, const std::vector<double>& x);

/// y = (A^N)^T x.
std::vector<double> apply_signed_transpose(const Environment& env, const std::vector<double>& x);

/// Solves m = mu 1 + (1 - lambda)(A m - L^-), i.e. the stationary mean equations.
std::vector<double> solve_m(const Environment& env, const ModelParams& params,
                            const SolverOptions& options = {});

/// Solves c = 1 + (1 - lambda) A^T c.
std::vector<double> solve_c(const Environment& env, const ModelParams& params,
                            const SolverOptions& options = {});

EnvironmentSolution solve_environment(const Environment& env, const ModelParams& params,
                                      const SolverOptions& options = {});

/// m_inf = mean(m); v_inf = ||m - m_inf||^2; w_inf = mean(c^2 m (1 - m)).
TheoreticalLimits limits(const EnvironmentSolution& solution);
TheoreticalLimits limits(const Environment& env, const ModelParams& params);

/// Inversion applied to the quenched limits (the "T = infinity" estimator).
InversionResult limit_inversion(const Environment& env, const ModelParams& params, double r_plus);

}  // namespace densigraph
