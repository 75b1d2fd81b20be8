#pragma once

/**
 * Lifetime investment plan as a mixed-integer QP.
 *
 * Decision vector (length 4M + 1, money in thousands):
 *
 *   [ stock_1..stock_M | borrow_1..borrow_M | save_1..save_M | house_1..house_M | insurance ]
 *
 * house_j is binary (buy the house in year j), at most one is set, and the
 * last house_years years are excluded. The objective, maximized, is
 *
 *   c'x + 1/2 x'Qx,   Q = -2 B diag(var_stock..., 0..., spread variance),
 *
 * i.e. discounted expected consumption minus B times its variance, plus the
 * discounted house utility and the insurance value. One row per year enforces
 * consumption D_k >= d_floor; a final row enforces sum(house) <= 1.
 *
 * The binaries are handled by enumeration: every admissible purchase year
 * (plus "never") fixes the house block and leaves a convex QP.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lifeplan/insurance_mc.hpp"
#include "lifeplan/qp_solver.hpp"

namespace lifeplan {

struct LifecycleConfig {
  int years_M = 30;
  double r = 0.03;           // utility discount
  double r_borrow = 0.065;
  double r_save = 0.025;
  double income_high = 200.0;
  double income_low = 10.0;
  double d_floor = 10.0;
  double initial_saving = 500.0;
  double risk_aversion_B = 3.0;
  double house_initial = 1800.0;
  double house_annual = 150.0;
  int house_years = 10;
  double house_growth = 0.0;
  double house_utility = 3500.0;
  // h, L and s are read from here; the discount rate and horizon come from r and years_M.
  HazardModel hazard{0.06, 0.03, 30.0, 0.5, 30};

  // Disabled instruments get an upper bound of zero.
  bool enable_stock = true;
  bool enable_borrow = true;
  bool enable_save = true;
  bool enable_house = true;
  bool enable_insurance = true;

  // Simulated V instead of h / (h + r).
  bool mc_discount_factor = false;
  // Simulated income-drop year instead of ceil(1/h).
  bool mc_kstart = false;
  std::int64_t mc_draws = 10000;

  void validate() const;

  /// The hazard model with r and horizon taken from this config.
  HazardModel hazard_model() const;
};

/// The long-only fund collapsed to one annualized (mean, variance) pair.
struct RiskyAssetSummary {
  double r_stock = 0.0;
  double var_stock = 0.0;
};

/// Index arithmetic for the decision vector; years are 1-based.
struct DecisionLayout {
  int M = 0;

  Eigen::Index size() const { return 4 * M + 1; }
  Eigen::Index stock(int k) const { return k - 1; }
  Eigen::Index borrow(int k) const { return M + k - 1; }
  Eigen::Index save(int k) const { return 2 * M + k - 1; }
  Eigen::Index house(int k) const { return 3 * M + k - 1; }
  Eigen::Index insurance() const { return 4 * M; }
};

/// Rows of `A x >= b`: one per year, then the single-purchase row.
struct ConstraintSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct LifecycleProblem {
  DecisionLayout layout;
  qp::QpProblem qp;  // maximization sense
  int kstart = 0;
  double discount_factor = 0.0;
};

struct BranchOutcome {
  std::optional<int> house_year;
  qp::QpStatus status = qp::QpStatus::infeasible;
  double objective = 0.0;
};

struct LifecyclePlan {
  DecisionLayout layout;
  Eigen::VectorXd decision;
  std::optional<int> house_year;
  double objective = 0.0;
  Eigen::VectorXd consumption;    // D_1..D_M
  double feasibility_report = 0.0;  // largest violation of the assembled constraints and bounds
  int kstart = 0;
  double discount_factor = 0.0;
  std::vector<BranchOutcome> branches;

  double stock(int k) const { return decision(layout.stock(k)); }
  double borrow(int k) const { return decision(layout.borrow(k)); }
  double save(int k) const { return decision(layout.save(k)); }
  double insurance_units() const { return decision(layout.insurance()); }
};

/// Values below this are reported as zero.
inline constexpr double kDecisionDust = 1e-9;

/// Column i: the payments caused by buying in year i (initial payment in year
/// i, then house_annual for house_years years, clipped to the horizon).
Eigen::MatrixXd house_payment_matrix(const LifecycleConfig& config);

Eigen::VectorXd assemble_linear_coefficients(const LifecycleConfig& config, const RiskyAssetSummary& asset,
                                             double discount_factor);
Eigen::VectorXd assemble_linear_coefficients(const LifecycleConfig& config, const RiskyAssetSummary& asset);

Eigen::MatrixXd assemble_quadratic(const LifecycleConfig& config, const RiskyAssetSummary& asset);

/// kstart in [1, M+1] is the first year on low income and without spread
/// payments; M+1 means the drop never happens within the horizon.
ConstraintSystem assemble_constraints(const LifecycleConfig& config, const RiskyAssetSummary& asset, int kstart);

/// Income-drop year used by the planner: ceil(1/h), or simulated when
/// config.mc_kstart is set. Clamped to [1, M+1].
int planner_kstart(const LifecycleConfig& config, std::uint64_t seed);

/// V used by the planner: h/(h+r), or simulated when config.mc_discount_factor is set.
double planner_discount_factor(const LifecycleConfig& config, std::uint64_t seed);

/// The relaxed problem (house binaries in [0, 1]).
LifecycleProblem build_lifecycle_problem(const LifecycleConfig& config, const RiskyAssetSummary& asset, int kstart,
                                         double discount_factor);

/// Solves the convex QP obtained by fixing the house block to `house`
/// (length M, any 0/1 pattern; constraint rows decide its feasibility).
qp::QpSolution solve_with_house_assignment(const LifecycleProblem& problem, const Eigen::VectorXd& house);

/// Best plan over "no house" and every admissible purchase year.
LifecyclePlan solve_lifecycle(const LifecycleConfig& config, const RiskyAssetSummary& asset, std::uint64_t seed = 0);

/// Consumption D_1..D_M recomputed from the budget identity.
Eigen::VectorXd implied_consumption(const Eigen::VectorXd& decision, const LifecycleConfig& config,
                                    const RiskyAssetSummary& asset, int kstart);

}  // namespace lifeplan
