// spherex: thresholds, constrained extrema and property checks for integral
// functionals on generalized spheres of H1.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "spherex/cli.hpp"

namespace {

using namespace spherex;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("spherex");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("SPHEREX_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    spdlog::error("cannot write {}", path);
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

int emit(const cli::CommandResult& res, const std::string& out_path, const std::string& csv_path) {
  for (const auto& line : res.summary) spdlog::info("{}", line);
  for (const auto& line : res.warnings) spdlog::warn("{}", line);
  const std::string doc = res.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << doc;
  } else if (!write_text(out_path, doc)) {
    return cli::kConfigInvalid;
  }
  if (!csv_path.empty() && !res.csv.empty() && !write_text(csv_path, res.csv)) {
    return cli::kConfigInvalid;
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Unique extrema of integral functionals on generalized spheres in H1"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string csv_path;
  bool parallel = false;
  app.add_option("--config", config_path, "Problem configuration (JSON)");
  app.add_option("--seed", seed, "Override the configuration seed");
  app.add_option("--out", out_path, "Write the JSON report here instead of standard output");
  app.add_option("--csv", csv_path, "Write the CSV table (solve: x,u pairs; sweep: rows) here");
  app.add_flag("--parallel", parallel, "Run sweep rows and multistart trials concurrently");

  auto* delta = app.add_subcommand("delta", "Thresholds delta and delta1");

  double radius = 0.0;
  std::string solve_sense = "min";
  auto* solve = app.add_subcommand("solve", "Extremum of J on C_r with its multiplier");
  solve->add_option("--r", radius, "Radius r > 0")->required();
  solve->add_option("--sense", solve_sense, "min or max")->check(CLI::IsMember({"min", "max"}));

  std::string sweep_sense = "both";
  auto* sweep = app.add_subcommand("sweep", "Extremal values over the configured r_list");
  sweep->add_option("--sense", sweep_sense, "both, min or max")
      ->check(CLI::IsMember({"both", "min", "max"}));

  auto* verify = app.add_subcommand("verify", "Run every property check");

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
  demo->add_option("name", demo_name, "Demonstration to run")
      ->required()
      ->check(CLI::IsMember({"remark1"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigInvalid;
  }

  try {
    ProblemConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (demo->parsed()) {
      cfg.f = {"neg_norm_sq", {}};
    } else {
      spdlog::error("--config is required for this command");
      return cli::kConfigInvalid;
    }
    if (seed) cfg.seed = *seed;
    cfg.solver.parallel = parallel;
    if (demo->parsed()) cfg.f = {"neg_norm_sq", {}};
    const Problem problem = build_problem(cfg);
    spdlog::debug("problem: f = {}, g = {}, mesh {} on ({}, {})", problem.f.name(), problem.g.name(),
                  problem.space.n_elems(), problem.space.a(), problem.space.b());

    cli::CommandResult res;
    if (delta->parsed()) {
      res = cli::cmd_delta(problem);
    } else if (solve->parsed()) {
      res = cli::cmd_solve(problem, radius, solve_sense == "max" ? Sense::max : Sense::min);
    } else if (sweep->parsed()) {
      res = cli::cmd_sweep(problem, {sweep_sense != "max", sweep_sense != "min"});
    } else if (verify->parsed()) {
      res = cli::cmd_verify(problem);
    } else {
      res = cli::cmd_demo_remark1(problem);
    }
    return emit(res, out_path, csv_path);
  } catch (const ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return cli::kConfigInvalid;
  } catch (const InconclusiveSolve& e) {
    spdlog::error("inconclusive solve: {}", e.what());
    return cli::kInconclusive;
  } catch (const RadiusTooLarge& e) {
    spdlog::error("{}", e.what());
    return cli::kRadiusTooLarge;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return cli::kInconclusive;
  }
}
