#pragma once

// Seeded trial sweeps, scaling fits and report emission.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "matchsim/cost_ledger.hpp"
#include "matchsim/grover.hpp"
#include "matchsim/matchers.hpp"
#include "matchsim/model.hpp"

namespace matchsim {

enum class Algorithm : std::uint8_t { exhaustive, sort_scan, two_sort, naive_grover, nested };

std::string_view to_string(Algorithm algorithm) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;
std::string_view to_string(Engine engine) noexcept;
std::optional<Engine> parse_engine(std::string_view name) noexcept;

struct SweepConfig {
  Algorithm algorithm = Algorithm::nested;
  std::vector<std::size_t> n_values;
  std::uint64_t trials_per_n = 1;
  std::uint64_t base_seed = 0;
  Engine engine = Engine::automatic;
  NoisePreset noise = NoisePreset::none;
  std::uint32_t uncompute_factor = 2;
  std::optional<std::size_t> block_size;
  /// CSV destination; the JSON aggregate is written beside it.
  std::string output;
  /// Worker threads; 0 means hardware concurrency. Output order never
  /// depends on this.
  unsigned threads = 1;
  EngineLimits limits;
};

/// Throws std::invalid_argument.
void validate(const SweepConfig& config);

/// Reads the JSON form of a SweepConfig. Unknown keys are rejected. Throws
/// std::invalid_argument.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

/// Throws ResourceLimitError naming the first N whose statevector run would
/// exceed the amplitude cap.
void check_resource_limits(const SweepConfig& config);

struct SweepRow {
  Algorithm algorithm = Algorithm::nested;
  std::size_t n = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  Counters counters;
  std::array<Counters, 4> phases{};
  std::uint64_t peak_workspace = 0;
  double predicted_success = 0;

  std::uint64_t total_cost() const noexcept { return counters.total(); }
};

struct SweepAggregate {
  std::size_t n = 0;
  std::uint64_t trials = 0;
  double mean_cost = 0;
  double geo_mean_cost = 0;
  double success_rate = 0;
  double mean_predicted_success = 0;
  std::array<double, 4> mean_phase_cost{};
};

struct ExponentFit {
  double slope = 0;
  double stderr_slope = 0;
};

struct SweepResult {
  Algorithm algorithm = Algorithm::nested;
  /// Ordered by (n, trial).
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
  /// Over geometric-mean costs; present only with three or more sizes.
  std::optional<ExponentFit> fit_log_normalized;
  std::optional<ExponentFit> fit_raw;
};

/// Seed of trial `trial` at size n.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, std::uint64_t trial) noexcept;

RunReport run_algorithm(Algorithm algorithm, const MatchInstance& instance, const NestedConfig& config);

SweepRow run_trial(const SweepConfig& config, std::size_t n, std::uint64_t trial);

SweepResult run_sweep(const SweepConfig& config);

/// Aggregates and fits for rows already ordered by (n, trial).
SweepResult summarize(Algorithm algorithm, std::vector<SweepRow> rows);

struct ScalingPoint {
  double n = 0;
  double cost = 0;
};

/// OLS slope of ln(cost / log2 N) (or ln cost) against ln N, with its
/// standard error. Throws std::invalid_argument for fewer than three points,
/// repeated N or non-positive values.
ExponentFit fit_exponent(std::span<const ScalingPoint> points, bool log_normalize);

inline constexpr std::string_view kCsvHeader =
    "algorithm,n,trial,seed,success,total_cost,l1_queries,l2_queries,mem_reads,mem_writes,peak_workspace,"
    "predicted_success";

void write_csv(std::ostream& out, const SweepResult& result);
std::string to_csv(const SweepResult& result);

/// Parses rows written by write_csv (phase breakdowns are not part of the
/// CSV and come back as zero). Throws std::invalid_argument.
SweepResult read_csv(std::istream& in);

nlohmann::json aggregate_json(const SweepResult& result);

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<std::size_t> n_values;
  /// geo_mean_cost[result][n index]
  std::vector<std::vector<double>> geo_mean_cost;
  /// ratio[result][n index] = cost / cost of the first result
  std::vector<std::vector<double>> ratio;
  /// Smallest N at which nested is cheaper than sort_scan, when both appear.
  std::optional<std::size_t> crossover_n;
};

/// Throws std::invalid_argument for fewer than two results or differing
/// n_values.
ComparisonTable compare_report(std::span<const SweepResult> results);

void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
void write_comparison_text(std::ostream& out, const ComparisonTable& table);

}  // namespace matchsim
