#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "matchsim/errors.hpp"
#include "matchsim/experiments.hpp"

using namespace matchsim;

namespace {

SweepConfig small_sweep(Algorithm algorithm) {
  SweepConfig c;
  c.algorithm = algorithm;
  c.n_values = {16, 64, 256};
  c.trials_per_n = 5;
  c.base_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("fit_exponent recovers exact power laws") {
  std::vector<ScalingPoint> linear;
  std::vector<ScalingPoint> three_quarter;
  for (const double n : {16.0, 64.0, 256.0, 1024.0}) {
    linear.push_back({n, 7 * n});
    three_quarter.push_back({n, 3 * std::pow(n, 0.75) * std::log2(n)});
  }
  const auto a = fit_exponent(linear, false);
  CHECK(std::abs(a.slope - 1) < 1e-12);
  CHECK(a.stderr_slope < 1e-12);
  CHECK(std::abs(fit_exponent(three_quarter, true).slope - 0.75) < 1e-12);

  std::vector<ScalingPoint> planted;
  for (double n = 8; n <= 8192; n *= 2) planted.push_back({n, 0.5 * std::pow(n, 1.37)});
  CHECK(std::abs(fit_exponent(planted, false).slope - 1.37) < 1e-9);
}

TEST_CASE("fit_exponent input errors") {
  const std::vector<ScalingPoint> two{{4, 1}, {16, 2}};
  CHECK_THROWS_AS(fit_exponent(two, false), std::invalid_argument);
  const std::vector<ScalingPoint> repeated{{4, 1}, {4, 2}, {16, 3}};
  CHECK_THROWS_AS(fit_exponent(repeated, false), std::invalid_argument);
  const std::vector<ScalingPoint> zero{{4, 1}, {8, 0}, {16, 3}};
  CHECK_THROWS_AS(fit_exponent(zero, false), std::invalid_argument);
}

TEST_CASE("CSV header is stable") {
  const auto result = run_sweep(small_sweep(Algorithm::sort_scan));
  const auto csv = to_csv(result);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "algorithm,n,trial,seed,success,total_cost,l1_queries,l2_queries,mem_reads,mem_writes,peak_workspace,"
        "predicted_success");
}

TEST_CASE("sweeps are deterministic across runs and thread counts") {
  for (const auto algorithm : {Algorithm::nested, Algorithm::naive_grover, Algorithm::two_sort}) {
    auto config = small_sweep(algorithm);
    const auto first = to_csv(run_sweep(config));
    CHECK(first == to_csv(run_sweep(config)));
    config.threads = 4;
    CHECK(first == to_csv(run_sweep(config)));
    config.base_seed = 78;
    CHECK(first != to_csv(run_sweep(config)));
  }
}

TEST_CASE("sweep shape and aggregates") {
  const auto result = run_sweep(small_sweep(Algorithm::nested));
  CHECK(result.rows.size() == 15);
  REQUIRE(result.aggregates.size() == 3);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    CHECK(result.rows[i].n == small_sweep(Algorithm::nested).n_values[i / 5]);
    CHECK(result.rows[i].trial == i % 5);
    CHECK(result.rows[i].seed == trial_seed(77, result.rows[i].n, i % 5));
  }
  CHECK(result.fit_raw.has_value());
  CHECK(result.fit_log_normalized.has_value());
  for (const auto& agg : result.aggregates) {
    CHECK(agg.trials == 5);
    CHECK(agg.geo_mean_cost <= agg.mean_cost + 1e-9);
    double phase_sum = 0;
    for (const double c : agg.mean_phase_cost) phase_sum += c;
    CHECK(phase_sum == doctest::Approx(agg.mean_cost));
  }

  auto two = small_sweep(Algorithm::nested);
  two.n_values = {16, 64};
  CHECK_FALSE(run_sweep(two).fit_raw.has_value());
}

TEST_CASE("trial seeds differ across sizes and trials") {
  CHECK(trial_seed(1, 16, 0) != trial_seed(1, 16, 1));
  CHECK(trial_seed(1, 16, 0) != trial_seed(1, 64, 0));
  CHECK(trial_seed(1, 16, 0) != trial_seed(2, 16, 0));
  CHECK(trial_seed(1, 16, 0) == trial_seed(1, 16, 0));
}

TEST_CASE("config validation") {
  const nlohmann::json good = {{"algorithm", "nested"}, {"n_values", {16, 64}}, {"trials_per_n", 3}, {"base_seed", 5}};
  const auto config = sweep_config_from_json(good);
  CHECK(config.algorithm == Algorithm::nested);
  CHECK(config.n_values == std::vector<std::size_t>{16, 64});
  CHECK(config.trials_per_n == 3);

  auto with = [&](const char* key, nlohmann::json value) {
    auto j = good;
    j[key] = std::move(value);
    return j;
  };
  CHECK_THROWS_AS(sweep_config_from_json(with("algorithm", "quantum_magic")), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("n_values", nlohmann::json::array())), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("n_values", {1})), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("trials_per_n", 0)), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("noise", "loud")), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("uncompute_factor", 3)), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("engine", "gpu")), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("bogus_key", 1)), std::invalid_argument);
  CHECK_THROWS_AS(sweep_config_from_json(with("trials_per_n", "many")), std::invalid_argument);
}

TEST_CASE("resource limit error names the offending N") {
  auto config = small_sweep(Algorithm::naive_grover);
  config.engine = Engine::statevector;
  config.limits.statevector_cap = 1024;  // 64^2 pairs exceed it
  try {
    check_resource_limits(config);
    FAIL("expected ResourceLimitError");
  } catch (const ResourceLimitError& e) {
    CHECK(std::string(e.what()).find("64") != std::string::npos);
  }
  CHECK_THROWS_AS(run_sweep(config), ResourceLimitError);
  config.engine = Engine::automatic;
  CHECK_NOTHROW(check_resource_limits(config));
}

TEST_CASE("CSV round trip") {
  const auto result = run_sweep(small_sweep(Algorithm::nested));
  std::istringstream in(to_csv(result));
  const auto back = read_csv(in);
  CHECK(back.algorithm == result.algorithm);
  REQUIRE(back.rows.size() == result.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].counters == result.rows[i].counters);
    CHECK(back.rows[i].success == result.rows[i].success);
    CHECK(back.rows[i].predicted_success == result.rows[i].predicted_success);
    CHECK(back.rows[i].peak_workspace == result.rows[i].peak_workspace);
  }
  CHECK(to_csv(back) == to_csv(result));

  std::istringstream bad("algorithm,n\nnested,16\n");
  CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}

TEST_CASE("compare_report") {
  const auto nested = run_sweep(small_sweep(Algorithm::nested));
  const std::vector<SweepResult> same{nested, nested};
  const auto t = compare_report(same);
  for (const auto& row : t.ratio)
    for (const double r : row) CHECK(r == doctest::Approx(1.0));

  auto other = small_sweep(Algorithm::sort_scan);
  other.n_values = {16, 64};
  const std::vector<SweepResult> mismatched{nested, run_sweep(other)};
  CHECK_THROWS_AS(compare_report(mismatched), std::invalid_argument);
  const std::vector<SweepResult> single{nested};
  CHECK_THROWS_AS(compare_report(single), std::invalid_argument);

  // nested (2569 at N=256) undercuts sort_scan once N is large enough.
  auto scan_cfg = small_sweep(Algorithm::sort_scan);
  scan_cfg.n_values = {16, 64, 256, 1024, 4096};
  auto nest_cfg = small_sweep(Algorithm::nested);
  nest_cfg.n_values = scan_cfg.n_values;
  const std::vector<SweepResult> pair{run_sweep(scan_cfg), run_sweep(nest_cfg)};
  const auto cross = compare_report(pair);
  REQUIRE(cross.crossover_n.has_value());
  CHECK(*cross.crossover_n <= 4096);

  std::ostringstream csv;
  write_comparison_csv(csv, cross);
  CHECK(csv.str().find("sort_scan") != std::string::npos);
}

TEST_CASE("naive Grover is cheaper than exhaustive at N=256") {
  auto naive = small_sweep(Algorithm::naive_grover);
  naive.n_values = {256};
  auto exhaustive = small_sweep(Algorithm::exhaustive);
  exhaustive.n_values = {256};
  const std::vector<SweepResult> both{run_sweep(exhaustive), run_sweep(naive)};
  const auto table = compare_report(both);
  CHECK(table.ratio[1][0] < 1.0);
}

TEST_CASE("aggregate JSON carries the per-N summary") {
  const auto result = run_sweep(small_sweep(Algorithm::sort_scan));
  const auto j = aggregate_json(result);
  CHECK(j.at("algorithm") == "sort_scan");
  CHECK(j.at("per_n").size() == 3);
}
