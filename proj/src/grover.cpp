#include "matchsim/grover.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "matchsim/errors.hpp"

namespace matchsim {

std::uint64_t statevector_cap_from_env() {
  const char* raw = std::getenv("MATCH_SIM_STATEVECTOR_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultStatevectorCap;
  std::size_t used = 0;
  unsigned long long cap = 0;
  try {
    cap = std::stoull(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || raw[used] != '\0' || cap == 0) {
    throw std::invalid_argument(fmt::format("MATCH_SIM_STATEVECTOR_CAP: expected a positive integer, got '{}'", raw));
  }
  return cap;
}

double rotation_angle(std::uint64_t space_size, std::uint64_t marked_count) {
  if (space_size == 0 || marked_count > space_size) {
    throw std::invalid_argument(fmt::format("rotation_angle: need 0 <= k <= M, got M={} k={}", space_size, marked_count));
  }
  return std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(space_size)));
}

std::uint64_t iteration_schedule(std::uint64_t space_size, std::uint64_t marked_count) {
  if (marked_count == 0) {
    throw ScheduleUndefinedError("iteration_schedule: no schedule exists for an empty marked set");
  }
  const double theta = rotation_angle(space_size, marked_count);
  constexpr double half_pi = std::numbers::pi / 2;
  const double ideal = std::numbers::pi / (4 * theta) - 0.5;
  const auto lo = static_cast<std::uint64_t>(std::max(0.0, std::floor(ideal)));
  const auto miss = [&](std::uint64_t r) { return std::abs((2.0 * static_cast<double>(r) + 1.0) * theta - half_pi); };
  // Exact ties (e.g. M = 2) resolve to the smaller count.
  return miss(lo + 1) < miss(lo) - 1e-12 ? lo + 1 : lo;
}

std::uint64_t textbook_iterations(std::uint64_t space_size, std::uint64_t marked_count) {
  if (marked_count == 0) {
    throw ScheduleUndefinedError("textbook_iterations: no schedule exists for an empty marked set");
  }
  return static_cast<std::uint64_t>(
      std::floor(std::numbers::pi / 4 * std::sqrt(static_cast<double>(space_size) / static_cast<double>(marked_count))));
}

double success_probability(std::uint64_t space_size, std::uint64_t marked_count, std::uint64_t iterations) {
  if (marked_count == 0) return 0.0;
  const double theta = rotation_angle(space_size, marked_count);
  const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
  return s * s;
}

double noisy_success_probability(std::uint64_t space_size, std::uint64_t marked_count,
                                 std::uint64_t iterations, double failure_prob) {
  if (failure_prob < 0.0 || failure_prob > 1.0) {
    throw std::invalid_argument(fmt::format("failure_prob must lie in [0, 1], got {}", failure_prob));
  }
  if (marked_count == 0) return 0.0;
  const double theta = rotation_angle(space_size, marked_count);
  const double s = std::sin(theta);
  const double c = std::cos(theta);

  using Mat = std::array<std::array<double, 2>, 2>;
  const auto mul = [](const Mat& a, const Mat& b) {
    Mat out{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return out;
  };
  const auto transpose = [](const Mat& a) { return Mat{{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; };

  // Basis: (uniform over marked, uniform over unmarked).
  const Mat diffusion{{{2 * s * s - 1, 2 * s * c}, {2 * s * c, 2 * c * c - 1}}};
  const Mat phase_flip{{{-1, 0}, {0, 1}}};
  const Mat grover = mul(diffusion, phase_flip);
  const Mat grover_t = transpose(grover);
  const Mat diffusion_t = transpose(diffusion);

  Mat rho{{{s * s, s * c}, {s * c, c * c}}};
  for (std::uint64_t r = 0; r < iterations; ++r) {
    const Mat fired = mul(mul(grover, rho), grover_t);
    const Mat dropped = mul(mul(diffusion, rho), diffusion_t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) rho[i][j] = (1 - failure_prob) * fired[i][j] + failure_prob * dropped[i][j];
  }
  return std::clamp(rho[0][0], 0.0, 1.0);
}

GroverStatevector::GroverStatevector(std::uint64_t space_size, std::vector<std::uint64_t> marked)
    : amplitudes_(space_size, 1.0 / std::sqrt(static_cast<double>(space_size))), marked_(std::move(marked)) {
  if (space_size == 0) throw std::invalid_argument("GroverStatevector: empty search space");
  for (const auto m : marked_) {
    if (m >= space_size) throw std::invalid_argument("GroverStatevector: marked index out of range");
  }
}

void GroverStatevector::apply_oracle() {
  for (const auto m : marked_) amplitudes_[m] = -amplitudes_[m];
}

void GroverStatevector::apply_diffusion() {
  long double sum = 0;
  for (const double a : amplitudes_) sum += a;
  const double twice_mean = static_cast<double>(2 * sum / static_cast<long double>(amplitudes_.size()));
  for (double& a : amplitudes_) a = twice_mean - a;
}

double GroverStatevector::norm_squared() const {
  long double sum = 0;
  for (const double a : amplitudes_) sum += static_cast<long double>(a) * a;
  return static_cast<double>(sum);
}

double GroverStatevector::marked_mass() const {
  long double sum = 0;
  for (const auto m : marked_) sum += static_cast<long double>(amplitudes_[m]) * amplitudes_[m];
  return static_cast<double>(sum);
}

std::uint64_t GroverStatevector::sample(Rng& rng) const {
  const double u = uniform_unit(rng) * norm_squared();
  double acc = 0;
  std::uint64_t last_nonzero = 0;
  for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
    const double p = amplitudes_[i] * amplitudes_[i];
    if (p > 0) last_nonzero = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_nonzero;
}

std::vector<std::uint64_t> marked_indices(const GroverProblem& problem) {
  std::vector<std::uint64_t> marked;
  if (problem.marked) {
    marked = *problem.marked;
    std::sort(marked.begin(), marked.end());
    if (std::adjacent_find(marked.begin(), marked.end()) != marked.end()) {
      throw std::invalid_argument("GroverProblem: repeated marked index");
    }
    if (!marked.empty() && marked.back() >= problem.space_size) {
      throw std::invalid_argument("GroverProblem: marked index out of range");
    }
  } else {
    if (!problem.oracle.indicator) throw std::invalid_argument("GroverProblem: oracle has no indicator");
    for (std::uint64_t x = 0; x < problem.space_size; ++x) {
      if (problem.oracle.indicator(x)) marked.push_back(x);
    }
  }
  if (marked.size() != problem.marked_count) {
    throw std::invalid_argument(fmt::format("GroverProblem: oracle marks {} indices but marked_count is {}",
                                            marked.size(), problem.marked_count));
  }
  return marked;
}

namespace {

void check_problem(const GroverProblem& problem) {
  if (problem.space_size == 0) throw std::invalid_argument("GroverProblem: space_size must be positive");
  if (problem.marked_count > problem.space_size) {
    throw std::invalid_argument("GroverProblem: marked_count exceeds space_size");
  }
}

void check_cap(const GroverProblem& problem, const EngineLimits& limits) {
  if (problem.space_size > limits.statevector_cap) {
    throw ResourceLimitError(fmt::format("statevector engine: search space of {} amplitudes exceeds the cap of {}",
                                         problem.space_size, limits.statevector_cap));
  }
}

bool contains_sorted(const std::vector<std::uint64_t>& sorted, std::uint64_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool is_marked(const GroverProblem& problem, const std::vector<std::uint64_t>* sorted_marked, std::uint64_t x) {
  return sorted_marked != nullptr ? contains_sorted(*sorted_marked, x) : problem.oracle.indicator(x);
}

GroverOutcome evolve_and_measure(const GroverProblem& problem, std::uint64_t iterations, const NoisyOracleSpec* noise,
                                 Rng& rng, CostLedger& ledger, const EngineLimits& limits) {
  check_problem(problem);
  check_cap(problem, limits);
  auto marked = marked_indices(problem);
  GroverStatevector state(problem.space_size, marked);
  for (std::uint64_t r = 0; r < iterations; ++r) {
    const bool fires = noise == nullptr || !bernoulli(rng, noise->failure_prob);
    state.apply_round(fires);
  }
  ledger.charge(problem.oracle.charge_for(iterations), problem.oracle.phase);

  GroverOutcome out;
  out.iterations_used = iterations;
  out.marked_mass = state.marked_mass();
  out.predicted_success =
      noise == nullptr
          ? success_probability(problem.space_size, problem.marked_count, iterations)
          : noisy_success_probability(problem.space_size, problem.marked_count, iterations, noise->failure_prob);
  out.measured_index = state.sample(rng);
  out.verified = contains_sorted(marked, out.measured_index);
  return out;
}

}  // namespace

GroverOutcome run_statevector(const GroverProblem& problem, std::uint64_t iterations, Rng& rng,
                              CostLedger& ledger, const EngineLimits& limits) {
  return evolve_and_measure(problem, iterations, nullptr, rng, ledger, limits);
}

GroverOutcome run_noisy_outer(const GroverProblem& problem, std::uint64_t iterations,
                              const NoisyOracleSpec& noise, Rng& rng, CostLedger& ledger,
                              const EngineLimits& limits) {
  if (noise.failure_prob < 0.0 || noise.failure_prob > 1.0) {
    throw std::invalid_argument(fmt::format("failure_prob must lie in [0, 1], got {}", noise.failure_prob));
  }
  return evolve_and_measure(problem, iterations, &noise, rng, ledger, limits);
}

GroverOutcome run_analytic(const GroverProblem& problem, std::uint64_t iterations, Rng& rng, CostLedger& ledger) {
  check_problem(problem);
  const std::uint64_t m = problem.space_size;
  const std::uint64_t k = problem.marked_count;

  std::optional<std::vector<std::uint64_t>> sorted_marked;
  if (problem.marked) sorted_marked = marked_indices(problem);
  const auto* known = sorted_marked ? &*sorted_marked : nullptr;
  if (known == nullptr && !problem.oracle.indicator) {
    throw std::invalid_argument("GroverProblem: oracle has no indicator");
  }

  ledger.charge(problem.oracle.charge_for(iterations), problem.oracle.phase);

  GroverOutcome out;
  out.iterations_used = iterations;
  out.predicted_success = success_probability(m, k, iterations);
  out.marked_mass = out.predicted_success;

  if (k > 0 && bernoulli(rng, out.predicted_success)) {
    const std::uint64_t rank = uniform_below(rng, k);
    if (known != nullptr) {
      out.measured_index = (*known)[rank];
    } else {
      std::uint64_t seen = 0;
      for (std::uint64_t x = 0; x < m; ++x) {
        if (problem.oracle.indicator(x) && seen++ == rank) {
          out.measured_index = x;
          break;
        }
      }
    }
  } else if (k < m) {
    do {
      out.measured_index = uniform_below(rng, m);
    } while (is_marked(problem, known, out.measured_index));
  } else {
    out.measured_index = uniform_below(rng, m);
  }
  out.verified = k > 0 && is_marked(problem, known, out.measured_index);
  return out;
}

Engine resolve_engine(Engine requested, std::uint64_t space_size, const EngineLimits& limits) noexcept {
  if (requested != Engine::automatic) return requested;
  return space_size <= limits.statevector_cap ? Engine::statevector : Engine::analytic;
}

GroverOutcome run_grover(const GroverProblem& problem, std::uint64_t iterations, Rng& rng, CostLedger& ledger,
                         const EngineLimits& limits) {
  switch (resolve_engine(problem.engine, problem.space_size, limits)) {
    case Engine::statevector: return run_statevector(problem, iterations, rng, ledger, limits);
    case Engine::analytic:
    case Engine::automatic: break;
  }
  return run_analytic(problem, iterations, rng, ledger);
}

}  // namespace matchsim
