#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "densigraph/estimators.hpp"
#include "densigraph/inversion.hpp"
#include "densigraph/model.hpp"
#include "densigraph/random.hpp"
#include "densigraph/theory_limits.hpp"

namespace densigraph {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SamplerKind { forward, perfect };

struct DeltaSpec {
  enum class Kind { one, log, fixed };
  Kind kind = Kind::one;
  std::size_t value = 1;

  std::size_t resolve(std::size_t t_len) const;
  std::string str() const;
};

struct VarySpec {
  std::string name;  // one of n, r_plus, beta, lambda, p
  std::vector<double> values;
};

/// Batch experiment description. Defaults: N = 500, r+ = beta = lambda = p = 0.5,
/// delta = 1, 1000 replicas.
struct ExperimentConfig {
  ModelParams params{0.25, 0.5, 0.5, 0.5, 500};
  std::vector<std::size_t> t_grid{100, 200, 500, 1000, 2000, 5000, 10000};
  std::size_t n_simu = 1000;
  DeltaSpec delta;
  SamplerKind sampler = SamplerKind::forward;
  Seed master_seed = 20240601;
  std::optional<VarySpec> vary;
  bool compute_limits = false;
  std::size_t max_depth = 0;          // perfect sampler; 0 = default
  std::optional<std::size_t> burnin;  // forward sampler; unset = default_burnin
  std::size_t threads = 0;            // 0 = hardware concurrency

  /// Varied values, or a single placeholder when nothing varies.
  std::vector<double> varied_values() const;
  /// Parameters for one varied value (beta is held fixed when lambda varies).
  ModelParams params_for(double varied_value) const;
  void validate() const;
};

/// Parses `key = value` lines (# comments) then applies `key=value` overrides.
ExperimentConfig parse_config(std::istream& is, const std::vector<std::string>& overrides = {});
ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

struct ResultRow {
  std::string vary;
  double value = 0.0;
  std::size_t t = 0;
  std::size_t replica = 0;  // 1-based
  MomentEstimates moments;
  InversionResult estimate;
  std::optional<std::string> failure;
  std::optional<TheoreticalLimits> limits;
  std::optional<InversionResult> limit_estimate;
};

/// One environment and one trajectory per (varied value, replica); the
/// estimators run on nested prefixes of that trajectory. Rows are ordered by
/// (varied value, T, replica) independent of scheduling.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kResultHeader =
    "vary,value,T,replica,m_hat,v_hat,w_hat,mu_hat,lambda_hat,p_hat,branch,guards,clipped,"
    "m_inf,v_inf,w_inf,mu_inf,lambda_inf,p_inf";

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);

struct SummaryEntry {
  std::string vary;
  double value = 0.0;
  std::string estimator;          // m, v, w, mu, lambda, p
  std::optional<std::size_t> t;   // empty for the T = infinity marks
  double median_abs_error = 0.0;
  std::size_t count = 0;
};

/// Median of finite values (mean of the middle two for even counts); NaN if none.
double median(std::vector<double> values);

/// Median absolute errors per (estimator, varied value, T) plus the limit
/// marks per (estimator, varied value).
std::vector<SummaryEntry> summarize(const std::vector<ResultRow>& rows, const ModelParams& truth);
std::vector<SummaryEntry> summarize(const std::vector<ResultRow>& rows,
                                    const ExperimentConfig& config);

void write_summary_csv(std::ostream& os, const std::vector<SummaryEntry>& entries);

}  // namespace densigraph
