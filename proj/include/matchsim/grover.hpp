#pragma once

// Grover search in the query model.
//
// Two engines simulate the same process: a real-amplitude statevector over
// the whole search space and an analytic engine that tracks only the
// rotation angle in the (marked, unmarked) plane. Both charge the ledger
// identically: every iteration applies the oracle once at its attached
// per-call charge, multiplied by the oracle's uncompute factor.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "matchsim/cost_ledger.hpp"
#include "matchsim/random.hpp"

namespace matchsim {

enum class Engine : std::uint8_t { statevector, analytic, automatic };

/// Default amplitude cap for the statevector engine; MATCH_SIM_STATEVECTOR_CAP
/// overrides it.
inline constexpr std::uint64_t kDefaultStatevectorCap = std::uint64_t{1} << 20;

std::uint64_t statevector_cap_from_env();

struct EngineLimits {
  std::uint64_t statevector_cap = kDefaultStatevectorCap;
};

/// Indicator function chi(x) = 1 iff F(x) = y0, with the cost of one
/// application attached.
struct Oracle {
  std::function<bool(std::uint64_t)> indicator;
  Counters per_call;
  Phase phase = Phase::outer_search;
  std::uint32_t uncompute_factor = 1;

  /// Ledger charge for `applications` oracle calls.
  Counters charge_for(std::uint64_t applications) const noexcept {
    return per_call * (applications * uncompute_factor);
  }
};

struct GroverProblem {
  std::uint64_t space_size = 0;
  std::uint64_t marked_count = 0;
  Oracle oracle;
  /// Marked indices when the simulator already knows them. Lets the engines
  /// avoid evaluating the indicator over the whole space.
  std::optional<std::vector<std::uint64_t>> marked;
  Engine engine = Engine::automatic;
};

struct GroverOutcome {
  std::uint64_t measured_index = 0;
  /// oracle(measured_index) == 1. This check is simulator bookkeeping and is
  /// not charged; algorithms that verify explicitly charge it themselves.
  bool verified = false;
  std::uint64_t iterations_used = 0;
  double predicted_success = 0.0;
  /// Probability mass on marked indices just before measurement.
  double marked_mass = 0.0;
};

/// Per-round probability that the oracle marks nothing.
struct NoisyOracleSpec {
  double failure_prob = 0.0;
};

/// arcsin(sqrt(k/M)).
double rotation_angle(std::uint64_t space_size, std::uint64_t marked_count);

/// Number of iterations r minimising |(2r+1) theta - pi/2|; ties go to the
/// smaller r. Throws ScheduleUndefinedError for k = 0 and
/// std::invalid_argument unless 1 <= k <= M.
std::uint64_t iteration_schedule(std::uint64_t space_size, std::uint64_t marked_count);

/// The textbook floor(pi/4 * sqrt(M/k)), reported alongside the schedule.
std::uint64_t textbook_iterations(std::uint64_t space_size, std::uint64_t marked_count);

/// sin^2((2r+1) theta); 0 when k = 0.
double success_probability(std::uint64_t space_size, std::uint64_t marked_count, std::uint64_t iterations);

/// Exact expected marked mass when each round independently drops the
/// oracle with probability `failure_prob`. Evolves the 2x2 density matrix
/// of the (marked, unmarked) plane.
double noisy_success_probability(std::uint64_t space_size, std::uint64_t marked_count,
                                 std::uint64_t iterations, double failure_prob);

/// Real amplitude vector over [0, M) with a fixed marked set.
class GroverStatevector {
 public:
  GroverStatevector(std::uint64_t space_size, std::vector<std::uint64_t> marked);

  void apply_oracle();
  /// Inversion about the mean.
  void apply_diffusion();
  /// One Grover iteration; with `oracle_fires` false only the diffusion acts.
  void apply_round(bool oracle_fires = true) {
    if (oracle_fires) apply_oracle();
    apply_diffusion();
  }

  double norm_squared() const;
  double marked_mass() const;
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  std::uint64_t sample(Rng& rng) const;

 private:
  std::vector<double> amplitudes_;
  std::vector<std::uint64_t> marked_;
};

/// Marked indices of `problem`, evaluating the indicator over the whole
/// space when they are not given. Throws std::invalid_argument if the count
/// disagrees with marked_count.
std::vector<std::uint64_t> marked_indices(const GroverProblem& problem);

GroverOutcome run_statevector(const GroverProblem& problem, std::uint64_t iterations, Rng& rng,
                              CostLedger& ledger, const EngineLimits& limits = {});

GroverOutcome run_analytic(const GroverProblem& problem, std::uint64_t iterations, Rng& rng,
                           CostLedger& ledger);

/// Statevector run in which each round's oracle independently fails to
/// mark anything with probability noise.failure_prob.
GroverOutcome run_noisy_outer(const GroverProblem& problem, std::uint64_t iterations,
                              const NoisyOracleSpec& noise, Rng& rng, CostLedger& ledger,
                              const EngineLimits& limits = {});

/// Resolves Engine::automatic against the cap.
Engine resolve_engine(Engine requested, std::uint64_t space_size, const EngineLimits& limits) noexcept;

/// Dispatches on problem.engine.
GroverOutcome run_grover(const GroverProblem& problem, std::uint64_t iterations, Rng& rng,
                         CostLedger& ledger, const EngineLimits& limits = {});

}  // namespace matchsim
