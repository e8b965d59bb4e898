// Acceptance gate: one line per criterion, exit status nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "matchsim/experiments.hpp"
#include "matchsim/grover.hpp"
#include "matchsim/matchers.hpp"
#include "matchsim/model.hpp"
#include "matchsim/sortsearch.hpp"

using namespace matchsim;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = no stated limit
  std::function<Verdict()> run;
};

double closed_form_mass(std::uint64_t m, std::uint64_t k, std::uint64_t r) {
  const double theta = std::asin(std::sqrt(static_cast<double>(k) / static_cast<double>(m)));
  const double s = std::sin(static_cast<double>(2 * r + 1) * theta);
  return s * s;
}

Verdict engine_equivalence() {
  std::vector<std::uint64_t> spaces;
  for (std::uint64_t m = 2; m <= 64; ++m) spaces.push_back(m);
  for (const std::uint64_t m : {128, 256, 512, 1024}) spaces.push_back(m);

  double worst = 0;
  std::size_t cases = 0;
  Rng rng(1);
  for (const auto m : spaces) {
    for (const std::uint64_t k : {0, 1, 2, 4}) {
      if (k > m) continue;
      GroverProblem problem;
      problem.space_size = m;
      problem.marked_count = k;
      problem.marked.emplace();
      for (std::uint64_t i = 0; i < k; ++i) problem.marked->push_back((i * m) / k);
      problem.engine = Engine::statevector;
      const std::uint64_t schedule = k == 0 ? 0 : iteration_schedule(m, k);
      for (std::uint64_t r = 0; r <= schedule + 2; ++r) {
        CostLedger ledger;
        const auto out = run_statevector(problem, r, rng, ledger);
        const double expected = k == 0 ? 0.0 : closed_form_mass(m, k, r);
        worst = std::max(worst, std::abs(out.marked_mass - expected));
        ++cases;
      }
    }
  }
  return {worst <= 1e-9, fmt::format("{} cases, max |mass - closed form| = {:.3e} (tol 1e-9)", cases, worst)};
}

Verdict failure_bound() {
  double worst_ratio = 0;
  for (std::uint64_t m = 4; m <= (std::uint64_t{1} << 16); m *= 2) {
    const double failure = 1 - closed_form_mass(m, 1, iteration_schedule(m, 1));
    worst_ratio = std::max(worst_ratio, failure * static_cast<double>(m));
  }
  return {worst_ratio <= 1.0, fmt::format("max failure * M = {:.4f} over M = 4..2^16 (must be <= 1)", worst_ratio)};
}

Verdict correctness_oracle() {
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  for (const std::size_t n : {4, 16, 64, 256}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto inst = generate_instance(n, seed);
      const auto truth = exhaustive_pairs(inst).found;
      for (const auto algorithm : {Algorithm::sort_scan, Algorithm::two_sort, Algorithm::naive_grover, Algorithm::nested}) {
        NestedConfig config;
        config.rng_seed = seed;
        const auto report = run_algorithm(algorithm, inst, config);
        ++checked;
        if (report.found && report.found != truth) ++mismatches;
        if (report.correct != report.found.has_value()) ++mismatches;
      }
    }
  }

  constexpr std::uint64_t kTrials = 2000;
  const NestedConfig base;
  const double p = composed_success(256, base).success;
  std::uint64_t unverified = 0;
  for (std::uint64_t t = 0; t < kTrials; ++t) {
    NestedConfig config;
    config.rng_seed = derive_seed(0xacce55, t);
    if (!nested_grover_match(generate_instance(256, t), config).found) ++unverified;
  }
  const double rate = static_cast<double>(unverified) / kTrials;
  const double sigma = std::sqrt(p * (1 - p) / kTrials);
  const bool consistent = std::abs(rate - (1 - p)) <= 3 * sigma;
  return {mismatches == 0 && consistent,
          fmt::format("{} verified outputs, {} mismatches; nested N=256 unverified rate {:.4f} vs predicted {:.4f} "
                      "(3 sigma = {:.4f}, {} trials)",
                      checked, mismatches, rate, 1 - p, 3 * sigma, kTrials)};
}

struct ScalingRun {
  SweepResult sort_scan;
  SweepResult nested;
  SweepResult naive;
};

const ScalingRun& scaling_run() {
  static const ScalingRun run = [] {
    auto sweep = [](Algorithm algorithm) {
      SweepConfig config;
      config.algorithm = algorithm;
      config.n_values = {256, 1024, 4096, 16384, 65536};
      config.trials_per_n = 3;
      config.base_seed = 4;
      config.engine = Engine::analytic;
      return run_sweep(config);
    };
    return ScalingRun{sweep(Algorithm::sort_scan), sweep(Algorithm::nested), sweep(Algorithm::naive_grover)};
  }();
  return run;
}

Verdict scaling_separation() {
  const auto& run = scaling_run();
  const double scan = run.sort_scan.fit_log_normalized->slope;
  const double nested = run.nested.fit_log_normalized->slope;
  const double naive = run.naive.fit_raw->slope;
  const bool pass = scan >= 0.95 && scan <= 1.05 && nested >= 0.70 && nested <= 0.85 && naive >= 0.95 && naive <= 1.05;
  return {pass, fmt::format("sort_scan {:.4f} in [0.95,1.05]; nested {:.4f} in [0.70,0.85]; naive_grover raw {:.4f} in "
                            "[0.95,1.05]",
                            scan, nested, naive)};
}

Verdict memory_claim() {
  const auto& run = scaling_run();
  double worst = 0;
  for (const auto& row : run.nested.rows) {
    worst = std::max(worst, static_cast<double>(row.peak_workspace) / std::sqrt(static_cast<double>(row.n)));
  }
  return {worst <= 4.0, fmt::format("max peak_workspace / sqrt(N) = {:.3f} (must be <= 4)", worst)};
}

Verdict error_analysis() {
  constexpr std::size_t kN = 4096;
  constexpr std::uint64_t kTrials = 10000;
  const auto plan = plan_nested(kN, NestedConfig{});
  const double ideal = closed_form_mass(plan.blocks, 1, plan.outer_iterations);

  auto outer_success_rate = [&](double failure) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < kTrials; ++t) {
      const auto inst = generate_instance(kN, derive_seed(0xe11, t));
      NestedConfig config;
      config.engine = Engine::statevector;
      config.noise = NoisyOracleSpec{failure};
      config.rng_seed = derive_seed(0xe12, t);
      const auto report = nested_grover_match(inst, config);
      if (report.measured_block == inst.planted_pos1 / plan.block_size) ++hits;
    }
    return static_cast<double>(hits) / kTrials;
  };

  const double noisy = outer_success_rate(1.0 / kN);
  const double sigma_noisy = std::sqrt(noisy * (1 - noisy) / kTrials);
  const double bound = 5 * std::pow(static_cast<double>(kN), -0.75);
  const double degradation = ideal - noisy;
  const bool small = degradation <= bound + 3 * sigma_noisy;

  const double collapsed = outer_success_rate(1.0);
  const double uniform = 1.0 / static_cast<double>(plan.blocks);
  const double sigma_uniform = std::sqrt(uniform * (1 - uniform) / kTrials);
  const bool collapse = std::abs(collapsed - uniform) <= 3 * sigma_uniform;

  return {plan.blocks == 64 && small && collapse,
          fmt::format("B={} ideal {:.5f}; eps=1/N success {:.5f}, degradation {:.5f} <= {:.5f}; eps=1 success {:.5f} vs "
                      "1/B {:.5f} +- {:.5f}",
                      plan.blocks, ideal, noisy, degradation, bound + 3 * sigma_noisy, collapsed, uniform,
                      3 * sigma_uniform)};
}

Verdict toy_cross_check() {
  constexpr std::uint64_t kSamples = 100000;
  double worst = 0;
  std::string detail;
  for (const std::size_t n : {4, 16}) {
    const auto inst = generate_instance(n, 21);
    const std::size_t b = default_block_size(n);
    const auto exact = two_level_outcome_distribution(inst, b);

    OutcomeDistribution empirical;
    empirical.found.assign(exact.found.size(), 0.0);
    empirical.not_found.assign(exact.not_found.size(), 0.0);
    NestedConfig config;
    config.noise = noise_for(NoisePreset::inner_exact, n);
    for (std::uint64_t s = 0; s < kSamples; ++s) {
      config.rng_seed = derive_seed(0x70f, n, s);
      const auto report = nested_grover_match(inst, config);
      auto& bucket = report.found ? empirical.found : empirical.not_found;
      bucket[*report.measured_block] += 1.0 / kSamples;
    }
    const double tv = empirical.total_variation(exact);
    worst = std::max(worst, tv);
    detail += fmt::format("{}N={} TV={:.5f}", detail.empty() ? "" : "; ", n, tv);
  }
  return {worst <= 0.01, detail + " (tol 0.01, 1e5 samples each)"};
}

Verdict reproducibility() {
  std::size_t configs = 0;
  bool identical = true;
  for (const auto algorithm : {Algorithm::exhaustive, Algorithm::sort_scan, Algorithm::two_sort, Algorithm::naive_grover,
                               Algorithm::nested}) {
    for (const auto noise : {NoisePreset::none, NoisePreset::inv_sqrt_n}) {
      SweepConfig config;
      config.algorithm = algorithm;
      config.n_values = {4, 16, 64, 256};
      config.trials_per_n = 8;
      config.base_seed = 99;
      config.noise = noise;
      const std::string first = to_csv(run_sweep(config));
      const std::string second = to_csv(run_sweep(config));
      config.threads = 3;
      const std::string threaded = to_csv(run_sweep(config));
      identical = identical && first == second && first == threaded;
      ++configs;
    }
  }
  return {identical, fmt::format("{} sweep configs, each run 3 times (1 and 3 threads): {}", configs,
                                 identical ? "byte-identical" : "outputs differ")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "engine equivalence", 10, engine_equivalence},
      {2, "Grover failure bound", 1, failure_bound},
      {3, "correctness oracle", 120, correctness_oracle},
      {4, "scaling separation", 300, scaling_separation},
      {5, "memory bound", 0, memory_claim},
      {6, "error analysis", 300, error_analysis},
      {7, "toy two-level cross-check", 0, toy_cross_check},
      {8, "reproducibility", 0, reproducibility},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s == 0 || seconds < c.time_limit_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    const std::string limit = c.time_limit_s == 0 ? "" : fmt::format(" / {:.0f}s", c.time_limit_s);
    fmt::print("[{}] criterion {}: {}: {} ({:.2f}s{})\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail, seconds, limit);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
