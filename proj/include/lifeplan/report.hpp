#pragma once

// Pipeline orchestration and the file formats written by the `lifeplan` tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lifeplan/constrained_portfolio.hpp"
#include "lifeplan/errors.hpp"
#include "lifeplan/lifecycle_planner.hpp"
#include "lifeplan/markowitz.hpp"

namespace lifeplan {

/// A failure somewhere in the pipeline; what() starts with the module name.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& module, const std::string& message)
      : Error(module + ": " + message), module_(module) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

struct RunConfig {
  std::filesystem::path returns_path = "data/sample_returns.csv";
  int periods_per_year = 12;
  double r_f = 0.025;
  int frontier_points = 25;
  std::int64_t mc_draws = 10000;
  std::uint64_t mc_seed = 1;
  LifecycleConfig lifecycle;
  std::filesystem::path output_dir = "out";
  bool paper_faithful_v = false;  // planner uses the simulated V
  bool mc_kstart = false;         // planner uses the simulated income-drop year
  bool emit_svg = false;

  void validate() const;
};

/// Parses `key = value` lines over `base`. '#' starts a comment; unknown keys,
/// duplicate keys and malformed values are errors. A relative returns_path is
/// resolved against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::string& source, RunConfig base = {},
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

enum class Stage { fund, frontier, insure, plan, all };

/// Runs the requested stage and returns the files written, in order. On
/// failure every file written by this call is removed and a PipelineError
/// propagates.
std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, Stage stage);

/// x = standard deviation, y = mean. The unconstrained curve is drawn at the
/// same target means when `constants` is given.
std::string render_frontier_svg(const ConstrainedFrontier& frontier, const std::optional<FrontierConstants>& constants);

std::string render_plan_csv(const LifecyclePlan& plan, const RiskyAssetSummary& asset);

/// What plan.csv carries, enough to recompute the consumption column.
struct PlanTable {
  Eigen::VectorXd decision;
  Eigen::VectorXd consumption;
  std::optional<int> house_year;
  int kstart = 0;
  double objective = 0.0;
  RiskyAssetSummary asset;
};

PlanTable parse_plan_csv(const std::string& text);

}  // namespace lifeplan
