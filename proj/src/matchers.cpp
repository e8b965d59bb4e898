#include "matchsim/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "matchsim/errors.hpp"
#include "matchsim/random.hpp"
#include "matchsim/sortsearch.hpp"

namespace matchsim {

std::string_view to_string(NoisePreset preset) noexcept {
  switch (preset) {
    case NoisePreset::none: return "none";
    case NoisePreset::inv_n: return "inv_n";
    case NoisePreset::inv_sqrt_n: return "inv_sqrt_n";
    case NoisePreset::inner_exact: return "inner_exact";
  }
  return "none";
}

std::optional<NoisePreset> parse_noise_preset(std::string_view name) noexcept {
  for (const auto p : {NoisePreset::none, NoisePreset::inv_n, NoisePreset::inv_sqrt_n, NoisePreset::inner_exact}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<NoisyOracleSpec> noise_for(NoisePreset preset, std::size_t n) {
  const auto dn = static_cast<double>(n);
  switch (preset) {
    case NoisePreset::none: return std::nullopt;
    case NoisePreset::inv_n: return NoisyOracleSpec{1.0 / dn};
    case NoisePreset::inv_sqrt_n: return NoisyOracleSpec{1.0 / std::sqrt(dn)};
    case NoisePreset::inner_exact:
      return NoisyOracleSpec{1.0 - success_probability(n, 1, iteration_schedule(n, 1))};
  }
  return std::nullopt;
}

namespace {

// Workspace held while a block is copied and sorted: the copy plus the
// merge buffer.
std::uint64_t block_workspace_cells(std::size_t length) noexcept { return length < 2 ? length : 2 * length; }

RunReport finish(const MatchInstance& instance, RunReport report) {
  report.correct = is_correct(instance, report.found);
  return report;
}

std::size_t checked_block_size(std::size_t n, const NestedConfig& config) {
  const std::size_t b = config.block_size.value_or(default_block_size(n));
  if (b == 0 || b > n) {
    throw std::invalid_argument(fmt::format("block size must lie in [1, {}], got {}", n, b));
  }
  return b;
}

}  // namespace

RunReport exhaustive_pairs(const MatchInstance& instance) {
  RunReport report;
  Counters spent;
  for (std::size_t i = 0; i < instance.n && !report.found; ++i) {
    for (std::size_t j = 0; j < instance.n; ++j) {
      spent.l1_queries += 1;
      spent.l2_queries += 1;
      if (instance.list1[i] == instance.list2[j]) {
        report.found = MatchPair{i, j};
        break;
      }
    }
  }
  report.ledger.charge(spent, Phase::final_verify);
  return finish(instance, std::move(report));
}

RunReport classical_sort_scan(const MatchInstance& instance) {
  RunReport report;
  CostLedger& ledger = report.ledger;
  WorkspaceLease lease;
  const SortedList sorted = copy_and_sort(instance.list1, AccessKind::l1_query, ledger, Phase::sort, lease);

  // Every element of L2 is checked; the scan does not stop at the match.
  for (std::size_t j = 0; j < instance.n; ++j) {
    ledger.charge(AccessKind::l2_query, 1, Phase::final_verify);
    const auto hit = binary_membership(sorted, instance.list2[j], ledger, Phase::final_verify);
    if (hit && !report.found) report.found = MatchPair{*hit, j};
  }
  lease.release();
  return finish(instance, std::move(report));
}

RunReport classical_two_sort_merge(const MatchInstance& instance) {
  RunReport report;
  CostLedger& ledger = report.ledger;
  WorkspaceLease lease1;
  WorkspaceLease lease2;
  const SortedList sorted1 = copy_and_sort(instance.list1, AccessKind::l1_query, ledger, Phase::sort, lease1);
  const SortedList sorted2 = copy_and_sort(instance.list2, AccessKind::l2_query, ledger, Phase::sort, lease2);

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < sorted1.size() && j < sorted2.size()) {
    ledger.charge(AccessKind::mem_read, 2, Phase::final_verify);
    const auto a = sorted1[i].value;
    const auto b = sorted2[j].value;
    if (a == b) {
      report.found = MatchPair{sorted1[i].index, sorted2[j].index};
      break;
    }
    if (a < b) {
      ++i;
    } else {
      ++j;
    }
  }
  lease1.release();
  lease2.release();
  return finish(instance, std::move(report));
}

RunReport naive_grover_pairs(const MatchInstance& instance, const NestedConfig& config) {
  if (config.uncompute_factor != 1 && config.uncompute_factor != 2) {
    throw std::invalid_argument("uncompute_factor must be 1 or 2");
  }
  const std::uint64_t n = instance.n;
  if (n > (std::uint64_t{1} << 32)) throw std::invalid_argument("naive_grover_pairs: N^2 overflows the index space");
  const std::uint64_t space = n * n;

  // The simulator locates the marked pair itself (uncharged) so the engines
  // need not scan N^2 indices.
  std::unordered_map<std::uint64_t, std::uint64_t> position1;
  position1.reserve(instance.n);
  for (std::size_t i = 0; i < instance.n; ++i) position1.emplace(instance.list1[i], i);
  std::vector<std::uint64_t> marked;
  for (std::size_t j = 0; j < instance.n; ++j) {
    if (const auto it = position1.find(instance.list2[j]); it != position1.end()) marked.push_back(it->second * n + j);
  }

  GroverProblem problem;
  problem.space_size = space;
  problem.marked_count = marked.size();
  problem.oracle.indicator = [&instance, n](std::uint64_t x) {
    return instance.list1[x / n] == instance.list2[x % n];
  };
  problem.oracle.per_call = Counters{.l1_queries = 1, .l2_queries = 1};
  problem.oracle.phase = Phase::outer_search;
  problem.oracle.uncompute_factor = config.uncompute_factor;
  problem.marked = std::move(marked);
  problem.engine = config.engine;

  RunReport report;
  report.rng_seed = config.rng_seed;
  Rng rng(config.rng_seed);
  const std::uint64_t iterations = iteration_schedule(space, 1);
  const GroverOutcome outcome = run_grover(problem, iterations, rng, report.ledger, config.limits);
  report.engine_stats.push_back({"pairs", space, iterations});
  report.predicted_success = success_probability(space, 1, iterations);
  if (outcome.verified) report.found = MatchPair{outcome.measured_index / n, outcome.measured_index % n};
  return finish(instance, std::move(report));
}

NestedPlan plan_nested(std::size_t n, const NestedConfig& config) {
  if (n < 2) throw std::invalid_argument(fmt::format("nested matcher needs N >= 2, got {}", n));
  if (config.uncompute_factor != 1 && config.uncompute_factor != 2) {
    throw std::invalid_argument(fmt::format("uncompute_factor must be 1 or 2, got {}", config.uncompute_factor));
  }
  NestedPlan plan;
  plan.n = n;
  plan.block_size = checked_block_size(n, config);
  plan.blocks = block_count(n, plan.block_size);
  plan.outer_iterations = iteration_schedule(plan.blocks, 1);
  plan.inner_iterations = iteration_schedule(n, 1);
  plan.inner_call = Counters{.l2_queries = 1} + membership_charge(plan.block_size);
  plan.outer_call = block_view_charge(plan.block_size) + plan.inner_call * (plan.inner_iterations + 1);
  return plan;
}

CostLedger predicted_total_cost(std::size_t n, const NestedConfig& config) {
  const NestedPlan plan = plan_nested(n, config);
  CostLedger ledger;
  ledger.charge(plan.outer_call, Phase::outer_search, plan.outer_iterations * config.uncompute_factor);
  ledger.charge(block_view_charge(plan.block_size), Phase::sort);
  ledger.charge(plan.inner_call, Phase::inner_search, plan.inner_iterations);
  ledger.charge(plan.inner_call, Phase::final_verify);
  ledger.acquire_workspace(block_workspace_cells(plan.block_size));
  ledger.release_workspace(block_workspace_cells(plan.block_size));
  return ledger;
}

ComposedPrediction composed_success(std::size_t n, const NestedConfig& config) {
  const NestedPlan plan = plan_nested(n, config);
  const double failure = config.noise ? config.noise->failure_prob : 0.0;
  ComposedPrediction out;
  out.outer_success = noisy_success_probability(plan.blocks, 1, plan.outer_iterations, failure);
  out.inner_success = success_probability(n, 1, plan.inner_iterations);
  out.success = out.outer_success * out.inner_success;
  out.expected_inner_failures = static_cast<double>(plan.outer_iterations) * failure;
  return out;
}

RunReport nested_grover_match(const MatchInstance& instance, const NestedConfig& config) {
  const NestedPlan plan = plan_nested(instance.n, config);
  RunReport report;
  report.rng_seed = config.rng_seed;
  report.predicted_success = composed_success(instance.n, config).success;
  CostLedger& ledger = report.ledger;
  Rng rng(config.rng_seed);

  // Simulator bookkeeping (uncharged): which blocks hold a value of L2.
  const std::unordered_set<std::uint64_t> in_list2(instance.list2.begin(), instance.list2.end());
  std::vector<std::uint64_t> marked_blocks;
  for (std::size_t block = 0; block < plan.blocks; ++block) {
    const std::size_t begin = block * plan.block_size;
    const std::size_t end = std::min(begin + plan.block_size, instance.n);
    for (std::size_t i = begin; i < end; ++i) {
      if (in_list2.contains(instance.list1[i])) {
        marked_blocks.push_back(block);
        break;
      }
    }
  }

  GroverProblem outer;
  outer.space_size = plan.blocks;
  outer.marked_count = marked_blocks.size();
  outer.oracle.indicator = [&marked_blocks](std::uint64_t block) {
    return std::binary_search(marked_blocks.begin(), marked_blocks.end(), block);
  };
  outer.oracle.per_call = plan.outer_call;
  outer.oracle.phase = Phase::outer_search;
  outer.oracle.uncompute_factor = config.uncompute_factor;
  outer.marked = marked_blocks;
  outer.engine = config.engine;

  GroverOutcome outer_outcome;
  {
    // The superposed block copy and its sort buffer.
    WorkspaceLease superposed(ledger, block_workspace_cells(plan.block_size));
    outer_outcome = config.noise
                        ? run_noisy_outer(outer, plan.outer_iterations, *config.noise, rng, ledger, config.limits)
                        : run_grover(outer, plan.outer_iterations, rng, ledger, config.limits);
  }
  report.engine_stats.push_back({"outer", plan.blocks, plan.outer_iterations});
  const std::size_t block = outer_outcome.measured_index;
  report.measured_block = block;

  // Final classical pass on the chosen block.
  BlockView view = block_view(instance, block, plan.block_size, ledger, Phase::sort);
  const auto lookup = [&view](std::uint64_t value) {
    const auto entries = view.workspace.entries();
    const auto it = std::lower_bound(entries.begin(), entries.end(), value,
                                     [](const Entry& e, std::uint64_t v) { return e.value < v; });
    return it != entries.end() && it->value == value;
  };
  std::vector<std::uint64_t> hits;
  for (std::size_t j = 0; j < instance.n; ++j) {
    if (lookup(instance.list2[j])) hits.push_back(j);
  }

  GroverProblem inner;
  inner.space_size = instance.n;
  inner.marked_count = hits.size();
  inner.oracle.indicator = [&instance, &lookup](std::uint64_t j) { return lookup(instance.list2[j]); };
  inner.oracle.per_call = Counters{.l2_queries = 1} + membership_charge(view.length);
  inner.oracle.phase = Phase::inner_search;
  inner.marked = std::move(hits);
  inner.engine = config.engine;

  // The block may hold no match, so the k = 1 schedule runs blind and one
  // more oracle call verifies the measurement.
  const GroverOutcome inner_outcome = run_grover(inner, plan.inner_iterations, rng, ledger, config.limits);
  report.engine_stats.push_back({"inner", instance.n, plan.inner_iterations});

  const std::size_t j = inner_outcome.measured_index;
  ledger.charge(AccessKind::l2_query, 1, Phase::final_verify);
  if (const auto i = binary_membership(view.workspace, instance.list2[j], ledger, Phase::final_verify)) {
    report.found = MatchPair{*i, j};
  }
  view.lease.release();
  return finish(instance, std::move(report));
}

double OutcomeDistribution::total_variation(const OutcomeDistribution& other) const {
  if (found.size() != other.found.size() || not_found.size() != other.not_found.size()) {
    throw std::invalid_argument("total_variation: distributions over different outcome sets");
  }
  double sum = 0;
  for (std::size_t i = 0; i < found.size(); ++i) sum += std::abs(found[i] - other.found[i]);
  for (std::size_t i = 0; i < not_found.size(); ++i) sum += std::abs(not_found[i] - other.not_found[i]);
  return sum / 2;
}

namespace {

// hits[b] = number of L2 entries matching something in block b.
std::vector<std::uint64_t> hits_per_block(const MatchInstance& instance, std::size_t block_size, std::size_t blocks) {
  std::vector<std::uint64_t> hits(blocks, 0);
  for (std::size_t i = 0; i < instance.n; ++i) {
    for (std::size_t j = 0; j < instance.n; ++j) {
      if (instance.list1[i] == instance.list2[j]) ++hits[i / block_size];
    }
  }
  return hits;
}

OutcomeDistribution finish_distribution(const std::vector<double>& block_probability,
                                        const std::vector<std::uint64_t>& hits, std::size_t n,
                                        std::uint64_t inner_iterations) {
  OutcomeDistribution dist;
  for (std::size_t b = 0; b < block_probability.size(); ++b) {
    const double inner = success_probability(n, hits[b], inner_iterations);
    dist.found.push_back(block_probability[b] * inner);
    dist.not_found.push_back(block_probability[b] * (1 - inner));
  }
  return dist;
}

}  // namespace

OutcomeDistribution semantic_outcome_distribution(const MatchInstance& instance, const NestedConfig& config) {
  const NestedPlan plan = plan_nested(instance.n, config);
  const auto hits = hits_per_block(instance, plan.block_size, plan.blocks);
  const double failure = config.noise ? config.noise->failure_prob : 0.0;
  const double on_marked = noisy_success_probability(plan.blocks, 1, plan.outer_iterations, failure);

  std::vector<double> block_probability(plan.blocks);
  for (std::size_t b = 0; b < plan.blocks; ++b) {
    block_probability[b] = hits[b] > 0 ? on_marked : (1 - on_marked) / static_cast<double>(plan.blocks - 1);
  }
  return finish_distribution(block_probability, hits, instance.n, plan.inner_iterations);
}

OutcomeDistribution two_level_outcome_distribution(const MatchInstance& instance, std::size_t block_size) {
  NestedConfig config;
  config.block_size = block_size;
  const NestedPlan plan = plan_nested(instance.n, config);
  const std::size_t n = instance.n;
  const std::size_t blocks = plan.blocks;
  constexpr std::size_t kJointCap = std::size_t{1} << 16;
  if (n * blocks > kJointCap) {
    throw ResourceLimitError(fmt::format("two-level statevector needs {} amplitudes, cap is {}", n * blocks, kJointCap));
  }

  // chi[b * n + j]: L2[j] matches an entry of block b.
  std::vector<char> chi(blocks * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (instance.list1[i] == instance.list2[j]) chi[(i / block_size) * n + j] = 1;
    }
  }

  const double u = 1.0 / std::sqrt(static_cast<double>(n));
  // Householder reflection exchanging |0> and the uniform state |u>.
  const auto prepare = [&](std::span<double> x) {
    // w = |0> - |u>, w.w = 2 - 2u.
    double w_dot_x = x[0];
    double sum = 0;
    for (const double a : x) sum += a;
    w_dot_x -= u * sum;
    const double scale = 2 * w_dot_x / (2 - 2 * u);
    x[0] -= scale;
    for (double& a : x) a += scale * u;
  };
  const auto diffuse = [](std::span<double> x) {
    double sum = 0;
    for (const double a : x) sum += a;
    const double twice_mean = 2 * sum / static_cast<double>(x.size());
    for (double& a : x) a = twice_mean - a;
  };
  const auto flip = [&](std::span<double> x, std::size_t b) {
    for (std::size_t j = 0; j < n; ++j)
      if (chi[b * n + j]) x[j] = -x[j];
  };

  std::vector<double> amp(blocks * n, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) amp[b * n] = 1.0 / std::sqrt(static_cast<double>(blocks));

  for (std::uint64_t round = 0; round < plan.outer_iterations; ++round) {
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::span<double> inner(amp.data() + b * n, n);
      // Compute: inner Grover from |0>.
      prepare(inner);
      for (std::uint64_t r = 0; r < plan.inner_iterations; ++r) {
        flip(inner, b);
        diffuse(inner);
      }
      // Phase kickback on a verified hit.
      flip(inner, b);
      // Uncompute.
      for (std::uint64_t r = 0; r < plan.inner_iterations; ++r) {
        diffuse(inner);
        flip(inner, b);
      }
      prepare(inner);
    }
    // Outer inversion about the mean, independently for each inner basis state.
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0;
      for (std::size_t b = 0; b < blocks; ++b) sum += amp[b * n + j];
      const double twice_mean = 2 * sum / static_cast<double>(blocks);
      for (std::size_t b = 0; b < blocks; ++b) amp[b * n + j] = twice_mean - amp[b * n + j];
    }
  }

  std::vector<double> block_probability(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < n; ++j) block_probability[b] += amp[b * n + j] * amp[b * n + j];
  }
  std::vector<std::uint64_t> hits(blocks, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < n; ++j) hits[b] += static_cast<std::uint64_t>(chi[b * n + j]);
  }
  return finish_distribution(block_probability, hits, n, plan.inner_iterations);
}

}  // namespace matchsim
