#include "matchsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "matchsim/errors.hpp"
#include "matchsim/random.hpp"
#include "matchsim/sortsearch.hpp"

namespace matchsim {

namespace {

constexpr std::array kAlgorithms = {Algorithm::exhaustive, Algorithm::sort_scan, Algorithm::two_sort,
                                    Algorithm::naive_grover, Algorithm::nested};
constexpr std::array kEngines = {Engine::statevector, Engine::analytic, Engine::automatic};

// Matcher streams are decorrelated from the instance generator.
constexpr std::uint64_t kMatcherStream = 0x6d61746368657273ULL;

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::exhaustive: return "exhaustive";
    case Algorithm::sort_scan: return "sort_scan";
    case Algorithm::two_sort: return "two_sort";
    case Algorithm::naive_grover: return "naive_grover";
    case Algorithm::nested: return "nested";
  }
  return "nested";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (const auto a : kAlgorithms) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Engine engine) noexcept {
  switch (engine) {
    case Engine::statevector: return "statevector";
    case Engine::analytic: return "analytic";
    case Engine::automatic: return "auto";
  }
  return "auto";
}

std::optional<Engine> parse_engine(std::string_view name) noexcept {
  for (const auto e : kEngines) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

void validate(const SweepConfig& config) {
  if (config.n_values.empty()) throw std::invalid_argument("sweep config: n_values must not be empty");
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    if (config.n_values[i] < 2) throw std::invalid_argument("sweep config: every N must be >= 2");
    if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) {
      throw std::invalid_argument("sweep config: n_values must be strictly ascending");
    }
  }
  if (config.trials_per_n < 1) throw std::invalid_argument("sweep config: trials_per_n must be >= 1");
  if (config.uncompute_factor != 1 && config.uncompute_factor != 2) {
    throw std::invalid_argument("sweep config: uncompute_factor must be 1 or 2");
  }
  if (config.block_size) {
    for (const auto n : config.n_values) {
      if (*config.block_size == 0 || *config.block_size > n) {
        throw std::invalid_argument(fmt::format("sweep config: block_size {} invalid for N={}", *config.block_size, n));
      }
    }
  }
  if (config.limits.statevector_cap == 0) throw std::invalid_argument("sweep config: statevector cap must be positive");
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  static const std::array<std::string_view, 11> known = {
      "algorithm", "n_values", "trials_per_n", "base_seed", "engine", "noise", "uncompute_factor",
      "block_size", "output", "threads", "statevector_cap"};
  if (!j.is_object()) throw std::invalid_argument("sweep config: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument(fmt::format("sweep config: unknown key '{}'", key));
    }
  }

  SweepConfig config;
  try {
    const auto algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!algorithm) throw std::invalid_argument("sweep config: unknown algorithm '" + j.at("algorithm").get<std::string>() + "'");
    config.algorithm = *algorithm;
    j.at("n_values").get_to(config.n_values);
    if (j.contains("trials_per_n")) j.at("trials_per_n").get_to(config.trials_per_n);
    if (j.contains("base_seed")) j.at("base_seed").get_to(config.base_seed);
    if (j.contains("engine")) {
      const auto engine = parse_engine(j.at("engine").get<std::string>());
      if (!engine) throw std::invalid_argument("sweep config: unknown engine");
      config.engine = *engine;
    }
    if (j.contains("noise")) {
      const auto noise = parse_noise_preset(j.at("noise").get<std::string>());
      if (!noise) throw std::invalid_argument("sweep config: unknown noise preset");
      config.noise = *noise;
    }
    if (j.contains("uncompute_factor")) j.at("uncompute_factor").get_to(config.uncompute_factor);
    if (j.contains("block_size") && !j.at("block_size").is_null()) config.block_size = j.at("block_size").get<std::size_t>();
    if (j.contains("output")) j.at("output").get_to(config.output);
    if (j.contains("threads")) j.at("threads").get_to(config.threads);
    if (j.contains("statevector_cap")) j.at("statevector_cap").get_to(config.limits.statevector_cap);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  // The environment wins over the file.
  if (std::getenv("MATCH_SIM_STATEVECTOR_CAP") != nullptr) config.limits.statevector_cap = statevector_cap_from_env();
  validate(config);
  return config;
}

void check_resource_limits(const SweepConfig& config) {
  const std::uint64_t cap = config.limits.statevector_cap;
  const auto over = [&](std::size_t n, std::uint64_t space) {
    if (space > cap) {
      throw ResourceLimitError(
          fmt::format("statevector engine: N={} needs a {}-amplitude state, cap is {}", n, space, cap));
    }
  };
  for (const auto n : config.n_values) {
    if (config.algorithm == Algorithm::naive_grover && config.engine == Engine::statevector) {
      over(n, static_cast<std::uint64_t>(n) * n);
    }
    if (config.algorithm == Algorithm::nested) {
      const std::size_t b = config.block_size.value_or(default_block_size(n));
      const std::size_t blocks = block_count(n, b);
      if (config.engine == Engine::statevector) {
        over(n, n);
        over(n, blocks);
      }
      // Noisy outer runs always use the statevector.
      if (config.noise != NoisePreset::none) over(n, blocks);
    }
  }
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, std::uint64_t trial) noexcept {
  return derive_seed(base_seed, n, trial);
}

RunReport run_algorithm(Algorithm algorithm, const MatchInstance& instance, const NestedConfig& config) {
  switch (algorithm) {
    case Algorithm::exhaustive: return exhaustive_pairs(instance);
    case Algorithm::sort_scan: return classical_sort_scan(instance);
    case Algorithm::two_sort: return classical_two_sort_merge(instance);
    case Algorithm::naive_grover: return naive_grover_pairs(instance, config);
    case Algorithm::nested: break;
  }
  return nested_grover_match(instance, config);
}

SweepRow run_trial(const SweepConfig& config, std::size_t n, std::uint64_t trial) {
  const std::uint64_t seed = trial_seed(config.base_seed, n, trial);
  const MatchInstance instance = generate_instance(n, seed);

  NestedConfig nested;
  nested.block_size = config.block_size;
  nested.engine = config.engine;
  nested.uncompute_factor = config.uncompute_factor;
  nested.noise = noise_for(config.noise, n);
  nested.rng_seed = derive_seed(seed, kMatcherStream);
  nested.limits = config.limits;

  const RunReport report = run_algorithm(config.algorithm, instance, nested);
  SweepRow row;
  row.algorithm = config.algorithm;
  row.n = n;
  row.trial = trial;
  row.seed = seed;
  row.success = report.correct;
  row.counters = report.ledger.totals();
  for (const auto p : kAllPhases) row.phases[static_cast<std::size_t>(p)] = report.ledger.phase(p);
  row.peak_workspace = report.ledger.peak_workspace();
  row.predicted_success = report.predicted_success;
  return row;
}

SweepResult run_sweep(const SweepConfig& config) {
  validate(config);
  check_resource_limits(config);

  struct Task {
    std::size_t n;
    std::uint64_t trial;
  };
  std::vector<Task> tasks;
  for (const auto n : config.n_values) {
    for (std::uint64_t t = 0; t < config.trials_per_n; ++t) tasks.push_back({n, t});
  }

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        rows[i] = run_trial(config, tasks[i].n, tasks[i].trial);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return summarize(config.algorithm, std::move(rows));
}

SweepResult summarize(Algorithm algorithm, std::vector<SweepRow> rows) {
  SweepResult result;
  result.algorithm = algorithm;
  result.rows = std::move(rows);

  for (std::size_t begin = 0; begin < result.rows.size();) {
    std::size_t end = begin;
    while (end < result.rows.size() && result.rows[end].n == result.rows[begin].n) ++end;

    SweepAggregate agg;
    agg.n = result.rows[begin].n;
    agg.trials = end - begin;
    double log_sum = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& row = result.rows[i];
      const auto cost = static_cast<double>(row.total_cost());
      agg.mean_cost += cost;
      log_sum += std::log(std::max(cost, 1.0));
      agg.success_rate += row.success ? 1.0 : 0.0;
      agg.mean_predicted_success += row.predicted_success;
      for (std::size_t p = 0; p < 4; ++p) agg.mean_phase_cost[p] += static_cast<double>(row.phases[p].total());
    }
    const auto count = static_cast<double>(agg.trials);
    agg.mean_cost /= count;
    agg.geo_mean_cost = std::exp(log_sum / count);
    agg.success_rate /= count;
    agg.mean_predicted_success /= count;
    for (auto& c : agg.mean_phase_cost) c /= count;
    result.aggregates.push_back(agg);
    begin = end;
  }

  if (result.aggregates.size() >= 3) {
    std::vector<ScalingPoint> points;
    for (const auto& agg : result.aggregates) points.push_back({static_cast<double>(agg.n), agg.geo_mean_cost});
    result.fit_log_normalized = fit_exponent(points, true);
    result.fit_raw = fit_exponent(points, false);
  }
  return result;
}

ExponentFit fit_exponent(std::span<const ScalingPoint> points, bool log_normalize) {
  if (points.size() < 3) {
    throw std::invalid_argument(fmt::format("fit_exponent: need at least 3 points, got {}", points.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    if (!(p.n > 1) || !(p.cost > 0)) throw std::invalid_argument("fit_exponent: N must exceed 1 and cost be positive");
    xs.push_back(std::log(p.n));
    ys.push_back(std::log(log_normalize ? p.cost / std::log2(p.n) : p.cost));
  }
  std::vector<double> sorted_x = xs;
  std::sort(sorted_x.begin(), sorted_x.end());
  if (std::adjacent_find(sorted_x.begin(), sorted_x.end()) != sorted_x.end()) {
    throw std::invalid_argument("fit_exponent: N values must be distinct");
  }

  const auto count = static_cast<double>(xs.size());
  double mean_x = 0;
  double mean_y = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  const double intercept = mean_y - fit.slope * mean_x;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse / (count - 2) / sxx);
  return fit;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& row : result.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(row.algorithm), row.n, row.trial, row.seed,
                       row.success ? 1 : 0, row.total_cost(), row.counters.l1_queries, row.counters.l2_queries,
                       row.counters.mem_reads, row.counters.mem_writes, row.peak_workspace, row.predicted_success);
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  write_csv(out, result);
  return out.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_number(const std::string& text, std::size_t line_no) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || in.peek() != std::char_traits<char>::eof()) {
    throw std::invalid_argument(fmt::format("csv line {}: cannot parse '{}'", line_no, text));
  }
  return value;
}

}  // namespace

SweepResult read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header");

  std::vector<SweepRow> rows;
  std::optional<Algorithm> algorithm;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 12) throw std::invalid_argument(fmt::format("csv line {}: expected 12 fields", line_no));
    const auto a = parse_algorithm(f[0]);
    if (!a) throw std::invalid_argument(fmt::format("csv line {}: unknown algorithm '{}'", line_no, f[0]));
    if (algorithm && *algorithm != *a) throw std::invalid_argument("csv: rows from more than one algorithm");
    algorithm = a;

    SweepRow row;
    row.algorithm = *a;
    row.n = parse_number<std::size_t>(f[1], line_no);
    row.trial = parse_number<std::uint64_t>(f[2], line_no);
    row.seed = parse_number<std::uint64_t>(f[3], line_no);
    row.success = parse_number<int>(f[4], line_no) != 0;
    row.counters.l1_queries = parse_number<std::uint64_t>(f[6], line_no);
    row.counters.l2_queries = parse_number<std::uint64_t>(f[7], line_no);
    row.counters.mem_reads = parse_number<std::uint64_t>(f[8], line_no);
    row.counters.mem_writes = parse_number<std::uint64_t>(f[9], line_no);
    if (row.total_cost() != parse_number<std::uint64_t>(f[5], line_no)) {
      throw std::invalid_argument(fmt::format("csv line {}: total_cost disagrees with its counters", line_no));
    }
    row.peak_workspace = parse_number<std::uint64_t>(f[10], line_no);
    row.predicted_success = parse_number<double>(f[11], line_no);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("csv: no rows");
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return x.n != y.n ? x.n < y.n : x.trial < y.trial;
  });
  return summarize(*algorithm, std::move(rows));
}

nlohmann::json aggregate_json(const SweepResult& result) {
  const auto fit_json = [](const std::optional<ExponentFit>& fit) -> nlohmann::json {
    if (!fit) return nullptr;
    return {{"slope", fit->slope}, {"stderr", fit->stderr_slope}};
  };
  nlohmann::json per_n = nlohmann::json::array();
  for (const auto& agg : result.aggregates) {
    nlohmann::json phases = nlohmann::json::object();
    for (const auto p : kAllPhases) phases[std::string(to_string(p))] = agg.mean_phase_cost[static_cast<std::size_t>(p)];
    per_n.push_back({{"n", agg.n},
                     {"trials", agg.trials},
                     {"mean_cost", agg.mean_cost},
                     {"geo_mean_cost", agg.geo_mean_cost},
                     {"success_rate", agg.success_rate},
                     {"mean_predicted_success", agg.mean_predicted_success},
                     {"mean_phase_cost", std::move(phases)}});
  }
  return {{"algorithm", to_string(result.algorithm)},
          {"rows", result.rows.size()},
          {"per_n", std::move(per_n)},
          {"fit", {{"log_normalized", fit_json(result.fit_log_normalized)}, {"raw", fit_json(result.fit_raw)}}}};
}

ComparisonTable compare_report(std::span<const SweepResult> results) {
  if (results.size() < 2) throw std::invalid_argument("compare: need at least two results");
  ComparisonTable table;
  for (const auto& agg : results.front().aggregates) table.n_values.push_back(agg.n);

  std::map<std::string, int> seen;
  for (const auto& result : results) {
    std::vector<std::size_t> ns;
    for (const auto& agg : result.aggregates) ns.push_back(agg.n);
    if (ns != table.n_values) throw std::invalid_argument("compare: results cover different n_values");

    std::string label(to_string(result.algorithm));
    if (const int count = ++seen[label]; count > 1) label += fmt::format("#{}", count);
    table.labels.push_back(label);

    std::vector<double> costs;
    for (const auto& agg : result.aggregates) costs.push_back(agg.geo_mean_cost);
    table.geo_mean_cost.push_back(std::move(costs));
  }
  for (const auto& costs : table.geo_mean_cost) {
    std::vector<double> ratio;
    for (std::size_t i = 0; i < costs.size(); ++i) ratio.push_back(costs[i] / table.geo_mean_cost.front()[i]);
    table.ratio.push_back(std::move(ratio));
  }

  std::optional<std::size_t> nested;
  std::optional<std::size_t> sort_scan;
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (results[r].algorithm == Algorithm::nested && !nested) nested = r;
    if (results[r].algorithm == Algorithm::sort_scan && !sort_scan) sort_scan = r;
  }
  if (nested && sort_scan) {
    for (std::size_t i = 0; i < table.n_values.size(); ++i) {
      if (table.geo_mean_cost[*nested][i] < table.geo_mean_cost[*sort_scan][i]) {
        table.crossover_n = table.n_values[i];
        break;
      }
    }
  }
  return table;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  out << "n";
  for (const auto& label : table.labels) out << ',' << label << "_geo_mean_cost";
  for (const auto& label : table.labels) out << ',' << label << "_ratio";
  out << '\n';
  for (std::size_t i = 0; i < table.n_values.size(); ++i) {
    out << table.n_values[i];
    for (const auto& costs : table.geo_mean_cost) out << ',' << fmt::format("{}", costs[i]);
    for (const auto& ratio : table.ratio) out << ',' << fmt::format("{}", ratio[i]);
    out << '\n';
  }
}

void write_comparison_text(std::ostream& out, const ComparisonTable& table) {
  out << fmt::format("{:>10}", "N");
  for (const auto& label : table.labels) out << fmt::format(" {:>16}", label);
  for (const auto& label : table.labels) out << fmt::format(" {:>16}", label + "/" + table.labels.front());
  out << '\n';
  for (std::size_t i = 0; i < table.n_values.size(); ++i) {
    out << fmt::format("{:>10}", table.n_values[i]);
    for (const auto& costs : table.geo_mean_cost) out << fmt::format(" {:>16.1f}", costs[i]);
    for (const auto& ratio : table.ratio) out << fmt::format(" {:>16.4f}", ratio[i]);
    out << '\n';
  }
  if (table.crossover_n) {
    out << fmt::format("nested is cheaper than sort_scan from N = {}\n", *table.crossover_n);
  }
}

}  // namespace matchsim
