// match-sim: command-line front end for the matching simulator.
//
//   match-sim run --algorithm nested --n 256 --seed 1 [--noise inv_n] [--engine analytic] [--uncompute 2]
//   match-sim sweep --config sweep.json
//   match-sim fit --input sweep.csv [--log-normalize]
//   match-sim compare a.csv b.csv ...
//   match-sim instance --n 16 --seed 1
//
// Exit codes: 0 success, 2 invalid configuration, 3 resource limit.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "matchsim/errors.hpp"
#include "matchsim/experiments.hpp"
#include "matchsim/matchers.hpp"
#include "matchsim/model.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

using namespace matchsim;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << contents;
}

struct RunOptions {
  std::string algorithm = "nested";
  std::size_t n = 256;
  std::uint64_t seed = 1;
  std::string noise = "none";
  std::string engine = "auto";
  std::uint32_t uncompute = 2;
  std::optional<std::size_t> block_size;
  std::string instance_path;
};

int cmd_run(const RunOptions& opt) {
  const auto algorithm = parse_algorithm(opt.algorithm);
  if (!algorithm) throw std::invalid_argument("unknown algorithm '" + opt.algorithm + "'");
  const auto engine = parse_engine(opt.engine);
  if (!engine) throw std::invalid_argument("unknown engine '" + opt.engine + "'");
  const auto noise = parse_noise_preset(opt.noise);
  if (!noise) throw std::invalid_argument("unknown noise preset '" + opt.noise + "'");

  MatchInstance instance;
  if (opt.instance_path.empty()) {
    instance = generate_instance(opt.n, opt.seed);
  } else {
    auto in = open_input(opt.instance_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("instance file: ") + e.what());
    }
    instance = doc.get<MatchInstance>();
  }

  NestedConfig config;
  config.block_size = opt.block_size;
  config.engine = *engine;
  config.uncompute_factor = opt.uncompute;
  config.noise = noise_for(*noise, instance.n);
  config.rng_seed = opt.seed;
  config.limits.statevector_cap = statevector_cap_from_env();

  const RunReport report = run_algorithm(*algorithm, instance, config);
  nlohmann::json out = report;
  out["algorithm"] = opt.algorithm;
  out["n"] = instance.n;
  out["instance_seed"] = instance.seed;
  if (*algorithm == Algorithm::nested) {
    const auto plan = plan_nested(instance.n, config);
    out["plan"] = {{"block_size", plan.block_size},
                   {"blocks", plan.blocks},
                   {"outer_iterations", plan.outer_iterations},
                   {"inner_iterations", plan.inner_iterations}};
    nlohmann::json composed = nlohmann::json::object();
    for (const auto preset : {NoisePreset::none, NoisePreset::inv_n, NoisePreset::inv_sqrt_n, NoisePreset::inner_exact}) {
      NestedConfig variant = config;
      variant.noise = noise_for(preset, instance.n);
      const auto c = composed_success(instance.n, variant);
      composed[std::string(to_string(preset))] = {{"outer_success", c.outer_success},
                                                  {"inner_success", c.inner_success},
                                                  {"success", c.success},
                                                  {"expected_inner_failures", c.expected_inner_failures}};
    }
    out["composed_predictions"] = std::move(composed);
    out["predicted_total_cost"] = predicted_total_cost(instance.n, config).total_cost();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& output_override) {
  auto in = open_input(config_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  SweepConfig config = sweep_config_from_json(doc);
  if (!output_override.empty()) config.output = output_override;

  const SweepResult result = run_sweep(config);
  const std::string csv = to_csv(result);
  const std::string aggregate = aggregate_json(result).dump(2) + "\n";
  if (config.output.empty()) {
    std::cout << csv;
    std::cerr << aggregate;
  } else {
    std::filesystem::path csv_path(config.output);
    write_file(csv_path, csv);
    write_file(std::filesystem::path(csv_path).replace_extension(".json"), aggregate);
    std::cout << aggregate;
  }
  return 0;
}

int cmd_fit(const std::string& input, bool log_normalize) {
  auto in = open_input(input);
  const SweepResult result = read_csv(in);
  std::vector<ScalingPoint> points;
  for (const auto& agg : result.aggregates) points.push_back({static_cast<double>(agg.n), agg.geo_mean_cost});
  const ExponentFit fit = fit_exponent(points, log_normalize);
  std::cout << fmt::format("algorithm={} points={} log_normalize={} slope={:.6f} stderr={:.6f}\n",
                           to_string(result.algorithm), points.size(), log_normalize, fit.slope, fit.stderr_slope);
  return 0;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& csv_out) {
  std::vector<SweepResult> results;
  for (const auto& path : inputs) {
    auto in = open_input(path);
    results.push_back(read_csv(in));
  }
  const ComparisonTable table = compare_report(results);
  write_comparison_text(std::cout, table);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + csv_out);
    write_comparison_csv(out, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-model simulator for nested Grover matching between two lists"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run one matcher on one instance and print its report as JSON");
  run->add_option("--algorithm", run_opt.algorithm, "exhaustive | sort_scan | two_sort | naive_grover | nested");
  run->add_option("--n", run_opt.n, "List length N");
  run->add_option("--seed", run_opt.seed, "Instance and matcher seed");
  run->add_option("--noise", run_opt.noise, "none | inv_n | inv_sqrt_n | inner_exact");
  run->add_option("--engine", run_opt.engine, "statevector | analytic | auto");
  run->add_option("--uncompute", run_opt.uncompute, "Uncompute factor (1 or 2)");
  run->add_option("--block-size", run_opt.block_size, "Block size (default ceil(sqrt(N)))");
  run->add_option("--instance", run_opt.instance_path, "Load the instance from a JSON file instead");

  std::string sweep_config;
  std::string sweep_output;
  auto* sweep = app.add_subcommand("sweep", "Run a seeded sweep; write CSV rows and a JSON aggregate");
  sweep->add_option("--config", sweep_config, "Sweep configuration (JSON)")->required();
  sweep->add_option("--output", sweep_output, "Override the CSV output path");

  std::string fit_input;
  bool fit_log_normalize = false;
  auto* fit = app.add_subcommand("fit", "Fit the cost scaling exponent of a sweep CSV");
  fit->add_option("--input", fit_input, "Sweep CSV")->required();
  fit->add_flag("--log-normalize", fit_log_normalize, "Divide costs by log2 N before fitting");

  std::vector<std::string> compare_inputs;
  std::string compare_csv;
  auto* compare = app.add_subcommand("compare", "Compare mean costs of several sweep CSVs");
  compare->add_option("inputs", compare_inputs, "Sweep CSVs")->required()->expected(2, -1);
  compare->add_option("--csv", compare_csv, "Also write the table as CSV");

  std::size_t inst_n = 16;
  std::uint64_t inst_seed = 1;
  auto* instance = app.add_subcommand("instance", "Print a generated instance as JSON");
  instance->add_option("--n", inst_n, "List length N");
  instance->add_option("--seed", inst_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*sweep) return cmd_sweep(sweep_config, sweep_output);
    if (*fit) return cmd_fit(fit_input, fit_log_normalize);
    if (*compare) return cmd_compare(compare_inputs, compare_csv);
    if (*instance) {
      nlohmann::json doc = generate_instance(inst_n, inst_seed);
      std::cout << doc.dump() << '\n';
      return 0;
    }
  } catch (const ResourceLimitError& e) {
    std::cerr << "match-sim: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "match-sim: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "match-sim: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "match-sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
