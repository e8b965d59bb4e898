#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "matchsim/cost_ledger.hpp"

namespace matchsim {

/// Two lists of length n sharing exactly one value. Values are distinct
/// within each list, so every other value appears in at most one list.
struct MatchInstance {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> list1;
  std::vector<std::uint64_t> list2;
  std::uint64_t planted_value = 0;
  std::size_t planted_pos1 = 0;
  std::size_t planted_pos2 = 0;

  friend bool operator==(const MatchInstance&, const MatchInstance&) = default;
};

/// Deterministic in (n, seed). Throws std::invalid_argument for n < 2.
MatchInstance generate_instance(std::size_t n, std::uint64_t seed);

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const MatchInstance& instance);

void to_json(nlohmann::json& j, const MatchInstance& instance);
/// Parses and validates.
void from_json(const nlohmann::json& j, MatchInstance& instance);

struct MatchPair {
  std::size_t l1_index = 0;
  std::size_t l2_index = 0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// One Grover invocation performed during a run.
struct GroverInvocation {
  std::string label;
  std::uint64_t space_size = 0;
  std::uint64_t iterations = 0;
};

struct RunReport {
  std::optional<MatchPair> found;
  bool correct = false;
  CostLedger ledger;
  std::vector<GroverInvocation> engine_stats;
  std::uint64_t rng_seed = 0;
  double predicted_success = 1.0;
  /// Block chosen by the outer search (nested matcher only).
  std::optional<std::size_t> measured_block;
};

/// True iff `found` is present and both indices hold the planted value.
bool is_correct(const MatchInstance& instance, const std::optional<MatchPair>& found) noexcept;

void to_json(nlohmann::json& j, const RunReport& report);

}  // namespace matchsim
