#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "densigraph/experiment.hpp"

using namespace densigraph;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.params.n = 30;
  cfg.t_grid = {100, 1000};
  cfg.n_simu = 4;
  cfg.master_seed = 99;
  return cfg;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("row count and order") {
    const auto rows = run_experiment(small_config());
    REQUIRE(rows.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(rows[k].t == (k < 4 ? 100U : 1000U));
      CHECK(rows[k].replica == k % 4 + 1);
      CHECK_FALSE(rows[k].limits.has_value());
    }
  }

  TEST_CASE("output is deterministic and independent of the thread count") {
    ExperimentConfig cfg = small_config();
    cfg.threads = 1;
    const std::string a = csv(run_experiment(cfg));
    const std::string b = csv(run_experiment(cfg));
    cfg.threads = 3;
    const std::string c = csv(run_experiment(cfg));
    CHECK(a == b);
    CHECK(a == c);
    cfg.master_seed = 100;
    CHECK(csv(run_experiment(cfg)) != a);
  }

  TEST_CASE("adding replicas leaves earlier ones unchanged") {
    ExperimentConfig cfg = small_config();
    cfg.t_grid = {200};
    cfg.n_simu = 3;
    const auto three = lines(csv(run_experiment(cfg)));
    cfg.n_simu = 4;
    const auto four = lines(csv(run_experiment(cfg)));
    REQUIRE(four.size() == three.size() + 1);
    for (std::size_t k = 0; k < three.size(); ++k) CHECK(three[k] == four[k]);
  }

  TEST_CASE("csv layout") {
    ExperimentConfig cfg = small_config();
    cfg.n_simu = 1;
    const auto out = lines(csv(run_experiment(cfg)));
    REQUIRE(out.size() == 3);
    CHECK(out[0] == kResultHeader);
    for (const auto& line : out) CHECK(std::count(line.begin(), line.end(), ',') == 18);
    CHECK(out[1].substr(out[1].size() - 6) == ",,,,,,");

    cfg.compute_limits = true;
    const auto with = lines(csv(run_experiment(cfg)));
    CHECK(with[1].back() != ',');
  }

  TEST_CASE("perfect sampler experiments") {
    ExperimentConfig cfg = small_config();
    cfg.sampler = SamplerKind::perfect;
    cfg.n_simu = 2;
    cfg.compute_limits = true;
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
      CHECK(r.moments.m_hat > 0.0);
      CHECK(r.moments.m_hat < 1.0);
      CHECK(r.limits.has_value());
    }
  }

  TEST_CASE("varied parameter") {
    ExperimentConfig cfg = small_config();
    cfg.vary = VarySpec{"lambda", {0.3, 0.7}};
    cfg.n_simu = 2;
    const ModelParams p = cfg.params_for(0.3);
    CHECK(p.lambda == 0.3);
    CHECK(p.beta() == doctest::Approx(0.5));
    CHECK(cfg.params_for(0.7).mu == doctest::Approx(0.35));
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].value == 0.3);
    CHECK(rows[4].value == 0.7);
    CHECK(rows[0].vary == "lambda");
    CHECK(lines(csv(rows))[1].rfind("lambda,0.29999999999999999,100,1,", 0) == 0);

    cfg.vary = VarySpec{"beta", {0.2}};
    CHECK(cfg.params_for(0.2).mu == doctest::Approx(0.1));
    cfg.vary = VarySpec{"n", {50}};
    CHECK(cfg.params_for(50).n == 50);
  }

  TEST_CASE("config parsing") {
    std::istringstream in(
        "# reduced run\n"
        "n = 100\n"
        "t_grid = 250, 500\n"
        "n_simu = 5   # replicas\n"
        "lambda = 0.4\n"
        "beta = 0.25\n"
        "delta = log\n"
        "sampler = perfect\n"
        "compute_limits = true\n");
    const ExperimentConfig cfg = parse_config(in, {"n_simu=7", "seed=12"});
    CHECK(cfg.params.n == 100);
    CHECK(cfg.t_grid == std::vector<std::size_t>{250, 500});
    CHECK(cfg.n_simu == 7);
    CHECK(cfg.master_seed == 12);
    CHECK(cfg.params.mu == doctest::Approx(0.1));
    CHECK(cfg.delta.kind == DeltaSpec::Kind::log);
    CHECK(cfg.delta.resolve(500) == 6);
    CHECK(cfg.sampler == SamplerKind::perfect);
    CHECK(cfg.compute_limits);

    std::istringstream defaults("");
    const ExperimentConfig d = parse_config(defaults);
    CHECK(d.params.n == 500);
    CHECK(d.params.mu == 0.25);
    CHECK(d.n_simu == 1000);
    CHECK(d.delta.resolve(10000) == 1);
    CHECK(d.t_grid.back() == 10000);

    CHECK(config_from_pairs({{"mu", "0.1"}, {"lambda", "0.2"}}).params.mu == 0.1);
    CHECK(config_from_pairs({{"delta", "3"}}).delta.resolve(100) == 3);
    CHECK(config_from_pairs({{"vary", "p"}, {"values", "0.2,0.4"}}).vary->values.size() == 2);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS((config_from_pairs({{"bogus", "1"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"n_simu", "0"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"n_simu", "-3"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"t_grid", "500,100"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"t_grid", "3"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"t_grid", ""}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"lambda", "abc"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"beta", "1.5"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"lambda", "0"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"sampler", "exact"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"vary", "mu"}, {"values", "0.1"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"values", "0.1"}})), ConfigError);
    CHECK_THROWS_AS((config_from_pairs({{"vary", "p"}, {"values", "1.2"}})), ConfigError);
    std::istringstream no_eq("n 100\n");
    CHECK_THROWS_AS((parse_config(no_eq)), ConfigError);
  }

  TEST_CASE("median convention") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK(median({1.0, std::nan(""), 5.0}) == 3.0);
    CHECK(std::isnan(median({})));
  }

  TEST_CASE("summary of a single row") {
    ResultRow row;
    row.t = 100;
    row.replica = 1;
    row.estimate.mu = 0.25;
    row.estimate.lambda = 0.5;
    row.estimate.p = 0.6;
    row.moments = {0.375, 0.0166015625, 0.2490234375, 1, 0, 0};
    const auto s = summarize({row}, ModelParams{0.25, 0.5, 0.5, 0.5, 500});
    const auto it = std::find_if(s.begin(), s.end(), [](const SummaryEntry& e) {
      return e.estimator == "p" && e.t == std::optional<std::size_t>{100};
    });
    REQUIRE(it != s.end());
    CHECK(it->median_abs_error == doctest::Approx(0.1));
    CHECK(it->count == 1);
    CHECK(s.size() == 6);
    CHECK_THROWS_AS((summarize({}, ModelParams{})), InvalidArgument);
  }

  TEST_CASE("summary with limit marks") {
    ExperimentConfig cfg = small_config();
    cfg.compute_limits = true;
    cfg.n_simu = 3;
    const auto s = summarize(run_experiment(cfg), cfg);
    CHECK(s.size() == 6 * 3);
    std::ostringstream os;
    write_summary_csv(os, s);
    const auto out = lines(os.str());
    CHECK(out[0] == "vary,value,estimator,T,median_abs_error,count");
    CHECK(out[3].rfind(",,m,inf,", 0) == 0);
  }
}
