#include "matchsim/model.hpp"

#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "matchsim/random.hpp"

namespace matchsim {

MatchInstance generate_instance(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument(fmt::format("generate_instance: n must be >= 2, got {}", n));

  Rng rng(seed);
  // 2n - 1 distinct values: n for L1, n - 1 fresh ones for L2.
  const std::size_t needed = 2 * n - 1;
  std::vector<std::uint64_t> values;
  values.reserve(needed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(needed);
  while (values.size() < needed) {
    const std::uint64_t v = rng();
    if (seen.insert(v).second) values.push_back(v);
  }

  MatchInstance inst;
  inst.n = n;
  inst.seed = seed;
  inst.planted_pos1 = static_cast<std::size_t>(uniform_below(rng, n));
  inst.planted_pos2 = static_cast<std::size_t>(uniform_below(rng, n));
  inst.list1.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n));
  inst.planted_value = inst.list1[inst.planted_pos1];

  inst.list2.reserve(n);
  auto fresh = values.begin() + static_cast<std::ptrdiff_t>(n);
  for (std::size_t j = 0; j < n; ++j) {
    inst.list2.push_back(j == inst.planted_pos2 ? inst.planted_value : *fresh++);
  }
  return inst;
}

void validate(const MatchInstance& inst) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid instance: " + what); };
  if (inst.n < 2) fail("n must be >= 2");
  if (inst.list1.size() != inst.n || inst.list2.size() != inst.n) fail("list lengths must equal n");
  if (inst.planted_pos1 >= inst.n || inst.planted_pos2 >= inst.n) fail("planted position out of range");
  if (inst.list1[inst.planted_pos1] != inst.planted_value ||
      inst.list2[inst.planted_pos2] != inst.planted_value) {
    fail("planted positions do not hold planted_value");
  }
  std::unordered_set<std::uint64_t> in1(inst.list1.begin(), inst.list1.end());
  if (in1.size() != inst.n) fail("list1 has repeated values");
  std::unordered_set<std::uint64_t> in2;
  std::size_t shared = 0;
  for (const auto v : inst.list2) {
    if (!in2.insert(v).second) fail("list2 has repeated values");
    if (in1.contains(v)) ++shared;
  }
  if (shared != 1) fail(fmt::format("expected exactly one shared value, found {}", shared));
}

void to_json(nlohmann::json& j, const MatchInstance& inst) {
  j = nlohmann::json{{"n", inst.n},
                     {"seed", inst.seed},
                     {"list1", inst.list1},
                     {"list2", inst.list2},
                     {"planted_value", inst.planted_value},
                     {"planted_pos1", inst.planted_pos1},
                     {"planted_pos2", inst.planted_pos2}};
}

void from_json(const nlohmann::json& j, MatchInstance& inst) {
  try {
    j.at("n").get_to(inst.n);
    j.at("seed").get_to(inst.seed);
    j.at("list1").get_to(inst.list1);
    j.at("list2").get_to(inst.list2);
    j.at("planted_value").get_to(inst.planted_value);
    j.at("planted_pos1").get_to(inst.planted_pos1);
    j.at("planted_pos2").get_to(inst.planted_pos2);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid instance document: ") + e.what());
  }
  validate(inst);
}

bool is_correct(const MatchInstance& inst, const std::optional<MatchPair>& found) noexcept {
  return found.has_value() && found->l1_index < inst.n && found->l2_index < inst.n &&
         inst.list1[found->l1_index] == inst.planted_value &&
         inst.list2[found->l2_index] == inst.planted_value;
}

namespace {

nlohmann::json counters_json(const Counters& c) {
  return {{"l1_queries", c.l1_queries},
          {"l2_queries", c.l2_queries},
          {"mem_reads", c.mem_reads},
          {"mem_writes", c.mem_writes},
          {"total", c.total()}};
}

}  // namespace

void to_json(nlohmann::json& j, const RunReport& report) {
  nlohmann::json phases = nlohmann::json::object();
  for (const auto p : kAllPhases) phases[std::string(to_string(p))] = counters_json(report.ledger.phase(p));

  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : report.engine_stats) {
    stats.push_back({{"label", s.label}, {"space_size", s.space_size}, {"iterations", s.iterations}});
  }

  j = nlohmann::json{{"found", nullptr},
                     {"correct", report.correct},
                     {"rng_seed", report.rng_seed},
                     {"predicted_success", report.predicted_success},
                     {"ledger", counters_json(report.ledger.totals())},
                     {"peak_workspace", report.ledger.peak_workspace()},
                     {"phases", std::move(phases)},
                     {"engine_stats", std::move(stats)}};
  if (report.found) j["found"] = {{"l1_index", report.found->l1_index}, {"l2_index", report.found->l2_index}};
  if (report.measured_block) j["measured_block"] = *report.measured_block;
}

}  // namespace matchsim
