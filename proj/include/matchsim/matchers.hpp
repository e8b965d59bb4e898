#pragma once

// End-to-end matching algorithms. Each call owns a fresh ledger and returns
// it in the RunReport.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "matchsim/cost_ledger.hpp"
#include "matchsim/grover.hpp"
#include "matchsim/model.hpp"

namespace matchsim {

/// Per-round dropout presets for the nested matcher's outer oracle.
enum class NoisePreset : std::uint8_t {
  none,
  inv_n,        // failure 1/N
  inv_sqrt_n,   // failure N^{-1/2}
  inner_exact,  // the inner search's own closed-form failure probability
};

std::string_view to_string(NoisePreset preset) noexcept;
std::optional<NoisePreset> parse_noise_preset(std::string_view name) noexcept;
std::optional<NoisyOracleSpec> noise_for(NoisePreset preset, std::size_t n);

struct NestedConfig {
  /// Defaults to ceil(sqrt(N)).
  std::optional<std::size_t> block_size;
  Engine engine = Engine::automatic;
  /// 2 charges each outer oracle call for computing and undoing the inner
  /// work; 1 gives the idealised cost.
  std::uint32_t uncompute_factor = 2;
  std::optional<NoisyOracleSpec> noise;
  std::uint64_t rng_seed = 0;
  EngineLimits limits;
};

RunReport exhaustive_pairs(const MatchInstance& instance);
RunReport classical_sort_scan(const MatchInstance& instance);
RunReport classical_two_sort_merge(const MatchInstance& instance);

/// Grover over all N^2 pairs.
RunReport naive_grover_pairs(const MatchInstance& instance, const NestedConfig& config);

/// Outer Grover over blocks of L1 whose oracle sorts the block and runs an
/// inner Grover over L2, followed by a classical sort of the chosen block
/// and one more inner search.
RunReport nested_grover_match(const MatchInstance& instance, const NestedConfig& config);

/// Sizes and per-call charges that drive both the nested matcher and its
/// cost prediction.
struct NestedPlan {
  std::size_t n = 0;
  std::size_t block_size = 0;
  std::size_t blocks = 0;
  std::uint64_t outer_iterations = 0;
  std::uint64_t inner_iterations = 0;
  /// One inner oracle call: an L2 query plus a membership probe into a block.
  Counters inner_call;
  /// One outer oracle evaluation before the uncompute factor: block copy and
  /// sort, then the inner search plus its verifying call.
  Counters outer_call;
};

/// Throws std::invalid_argument for n < 2, a zero block size, a block size
/// above n or an uncompute factor outside {1, 2}.
NestedPlan plan_nested(std::size_t n, const NestedConfig& config);

/// Closed-form ledger of a nested run that ends on a full-length block.
/// Exact whenever the block size divides N.
CostLedger predicted_total_cost(std::size_t n, const NestedConfig& config);

struct ComposedPrediction {
  double outer_success = 0;
  double inner_success = 0;
  /// outer_success * inner_success: the final pass verifies deterministically.
  double success = 0;
  /// outer iterations times the per-round oracle failure probability.
  double expected_inner_failures = 0;
};

ComposedPrediction composed_success(std::size_t n, const NestedConfig& config);

/// Probability of each (measured block, found / not found) outcome.
struct OutcomeDistribution {
  std::vector<double> found;
  std::vector<double> not_found;

  double total_variation(const OutcomeDistribution& other) const;
};

/// Outcome distribution of the nested matcher as simulated semantically:
/// the outer search sees a block indicator, dropped per round with the
/// configured noise.
OutcomeDistribution semantic_outcome_distribution(const MatchInstance& instance, const NestedConfig& config);

/// Same outcomes from a full statevector over (block, L2 position): every
/// outer oracle call runs the inner Grover coherently, flips the phase on a
/// hit and runs the inner search backwards. Only for toy sizes; throws
/// ResourceLimitError above 2^16 joint amplitudes.
OutcomeDistribution two_level_outcome_distribution(const MatchInstance& instance, std::size_t block_size);

}  // namespace matchsim
