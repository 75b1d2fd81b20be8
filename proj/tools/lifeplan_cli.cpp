// lifeplan: long-only fund selection, frontier tracing, insurance valuation
// and lifetime plan construction from a returns CSV.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lifeplan/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lifetime investment planner"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string returns_path;
  bool paper_faithful_v = false;
  bool mc_kstart = false;
  bool emit_svg = false;

  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for the Monte-Carlo stages");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--returns", returns_path, "returns CSV (overrides the config file)");
  app.add_flag("--paper-faithful-v", paper_faithful_v, "plan with the simulated insurance discount factor");
  app.add_flag("--mc-kstart", mc_kstart, "plan with the simulated income-drop year");
  app.add_flag("--emit-svg", emit_svg, "also write frontier.svg");

  const std::pair<const char*, lifeplan::Stage> stages[] = {
      {"fund", lifeplan::Stage::fund},       {"frontier", lifeplan::Stage::frontier},
      {"insure", lifeplan::Stage::insure},   {"plan", lifeplan::Stage::plan},
      {"all", lifeplan::Stage::all},
  };
  const char* help[] = {
      "estimate statistics and write the long-only maximum-Sharpe fund",
      "write the constrained and unconstrained frontiers",
      "estimate the insurance discount factor",
      "solve the lifetime plan",
      "run every stage",
  };
  for (std::size_t i = 0; i < std::size(stages); ++i) app.add_subcommand(stages[i].first, help[i]);

  CLI11_PARSE(app, argc, argv);

  lifeplan::Stage stage = lifeplan::Stage::all;
  for (const auto& [name, s] : stages)
    if (app.got_subcommand(name)) stage = s;

  try {
    lifeplan::RunConfig config;
    if (!config_path.empty()) config = lifeplan::load_run_config(config_path);
    if (seed) config.mc_seed = *seed;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!returns_path.empty()) config.returns_path = returns_path;
    config.paper_faithful_v = config.paper_faithful_v || paper_faithful_v;
    config.mc_kstart = config.mc_kstart || mc_kstart;
    config.emit_svg = config.emit_svg || emit_svg;

    for (const auto& path : lifeplan::run_pipeline(config, stage)) std::cout << "wrote " << path.string() << "\n";
  } catch (const lifeplan::PipelineError& e) {
    std::cerr << "lifeplan: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "lifeplan: cli_report: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
