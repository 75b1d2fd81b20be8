#include "lifeplan/lifecycle_planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lifeplan/errors.hpp"

namespace lifeplan {

namespace {

std::string branch_label(const std::optional<int>& year) {
  return year ? "house_year=" + std::to_string(*year) : std::string("house_year=none");
}

void validate_asset(const RiskyAssetSummary& asset) {
  if (!std::isfinite(asset.r_stock) || !std::isfinite(asset.var_stock))
    throw DomainError("risky asset summary has non-finite entries");
  if (asset.var_stock < 0.0) throw DomainError("risky asset variance must be >= 0");
}

}  // namespace

void LifecycleConfig::validate() const {
  if (years_M < 2) throw DomainError("years_M must be >= 2");
  if (house_years < 0 || house_years >= years_M) throw DomainError("house_years must lie in [0, years_M)");
  for (double v : {r, r_borrow, r_save, income_high, income_low, d_floor, initial_saving, risk_aversion_B,
                   house_initial, house_annual, house_growth, house_utility}) {
    if (!std::isfinite(v)) throw DomainError("lifecycle config has a non-finite entry");
  }
  if (r_borrow < r_save) throw DomainError("r_borrow must be >= r_save");
  if (risk_aversion_B < 0.0) throw DomainError("risk_aversion_B must be >= 0");
  if (d_floor > income_low + initial_saving) throw DomainError("d_floor exceeds income_low + initial_saving");
  if (mc_draws < 1) throw DomainError("mc_draws must be >= 1");
  hazard_model().validate();
}

HazardModel LifecycleConfig::hazard_model() const {
  HazardModel m = hazard;
  m.r = r;
  m.horizon_M = years_M;
  return m;
}

Eigen::MatrixXd house_payment_matrix(const LifecycleConfig& config) {
  const int M = config.years_M;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M, M);
  for (int i = 1; i <= M; ++i) {
    P(i - 1, i - 1) = config.house_initial * std::exp(i * config.house_growth);
    for (int j = i + 1; j <= std::min(M, i + config.house_years); ++j) P(j - 1, i - 1) = config.house_annual;
  }
  return P;
}

Eigen::VectorXd assemble_linear_coefficients(const LifecycleConfig& config, const RiskyAssetSummary& asset,
                                             double discount_factor) {
  const int M = config.years_M;
  const DecisionLayout L{M};
  const double r = config.r;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(L.size());
  auto disc = [r](int k) { return std::exp(-k * r); };

  for (int k = 1; k < M; ++k) {
    c(L.stock(k)) = -disc(k) + disc(k + 1) * (1.0 + asset.r_stock);
    c(L.borrow(k)) = disc(k) - disc(k + 1) * (1.0 + config.r_borrow);
    c(L.save(k)) = -disc(k) + disc(k + 1) * (1.0 + config.r_save);
  }
  // Final-year flows have no maturity inside the horizon; all three carry -e^{-Mr}.
  c(L.stock(M)) = -disc(M);
  c(L.borrow(M)) = -disc(M);
  c(L.save(M)) = -disc(M);

  const Eigen::MatrixXd P = house_payment_matrix(config);
  Eigen::RowVectorXd neg_disc(M);
  for (int k = 1; k <= M; ++k) neg_disc(k - 1) = -disc(k);
  const Eigen::RowVectorXd house = neg_disc * P;
  for (int j = 1; j <= M; ++j) c(L.house(j)) = house(j - 1) + disc(j) * config.house_utility;

  c(L.insurance()) = spread_linear_coefficient(config.hazard_model(), discount_factor);
  return c;
}

Eigen::VectorXd assemble_linear_coefficients(const LifecycleConfig& config, const RiskyAssetSummary& asset) {
  return assemble_linear_coefficients(config, asset, analytic_discount_factor(config.hazard_model()));
}

Eigen::MatrixXd assemble_quadratic(const LifecycleConfig& config, const RiskyAssetSummary& asset) {
  validate_asset(asset);
  const DecisionLayout L{config.years_M};
  Eigen::VectorXd d = Eigen::VectorXd::Zero(L.size());
  for (int k = 1; k <= L.M; ++k) d(L.stock(k)) = asset.var_stock;
  d(L.insurance()) = spread_variance_coefficient(config.hazard_model());
  return Eigen::MatrixXd(d.asDiagonal()) * (-2.0 * config.risk_aversion_B);
}

ConstraintSystem assemble_constraints(const LifecycleConfig& config, const RiskyAssetSummary& asset, int kstart) {
  const int M = config.years_M;
  if (kstart < 1 || kstart > M + 1) throw DomainError("kstart must lie in [1, M+1]");
  const DecisionLayout L{M};
  const Eigen::MatrixXd P = house_payment_matrix(config);

  ConstraintSystem sys;
  sys.A = Eigen::MatrixXd::Zero(M + 1, L.size());
  sys.b = Eigen::VectorXd::Zero(M + 1);
  for (int k = 1; k <= M; ++k) {
    const int row = k - 1;
    sys.A(row, L.stock(k)) = -1.0;
    sys.A(row, L.borrow(k)) = 1.0;
    sys.A(row, L.save(k)) = -1.0;
    if (k > 1) {
      sys.A(row, L.stock(k - 1)) = 1.0 + asset.r_stock;
      sys.A(row, L.borrow(k - 1)) = -(1.0 + config.r_borrow);
      sys.A(row, L.save(k - 1)) = 1.0 + config.r_save;
    }
    for (int j = 1; j <= M; ++j) sys.A(row, L.house(j)) = -P(k - 1, j - 1);
    if (k < kstart) sys.A(row, L.insurance()) = -config.hazard.s;
    sys.b(row) = config.d_floor - (k < kstart ? config.income_high : config.income_low);
  }
  sys.b(0) -= config.initial_saving;

  for (int j = 1; j <= M; ++j) sys.A(M, L.house(j)) = -1.0;
  sys.b(M) = -1.0;
  return sys;
}

int planner_kstart(const LifecycleConfig& config, std::uint64_t seed) {
  const HazardModel model = config.hazard_model();
  const int k = config.mc_kstart ? expected_strike_year(model, config.mc_draws, seed) : analytic_strike_year(model);
  return std::clamp(k, 1, config.years_M + 1);
}

double planner_discount_factor(const LifecycleConfig& config, std::uint64_t seed) {
  const HazardModel model = config.hazard_model();
  return config.mc_discount_factor ? estimate_discount_factor(model, config.mc_draws, seed).value
                                   : analytic_discount_factor(model);
}

LifecycleProblem build_lifecycle_problem(const LifecycleConfig& config, const RiskyAssetSummary& asset, int kstart,
                                         double discount_factor) {
  config.validate();
  validate_asset(asset);
  const int M = config.years_M;
  const DecisionLayout L{M};

  LifecycleProblem p;
  p.layout = L;
  p.kstart = kstart;
  p.discount_factor = discount_factor;
  p.qp = qp::QpProblem::free(L.size());
  p.qp.Q = assemble_quadratic(config, asset);
  p.qp.c = assemble_linear_coefficients(config, asset, discount_factor);
  ConstraintSystem sys = assemble_constraints(config, asset, kstart);
  p.qp.Ain = std::move(sys.A);
  p.qp.bin = std::move(sys.b);

  p.qp.lb.setZero();
  for (int k = 1; k <= M; ++k) {
    if (!config.enable_stock) p.qp.ub(L.stock(k)) = 0.0;
    if (!config.enable_borrow) p.qp.ub(L.borrow(k)) = 0.0;
    if (!config.enable_save) p.qp.ub(L.save(k)) = 0.0;
    p.qp.ub(L.house(k)) = (config.enable_house && k <= M - config.house_years) ? 1.0 : 0.0;
  }
  if (!config.enable_insurance) p.qp.ub(L.insurance()) = 0.0;
  return p;
}

qp::QpSolution solve_with_house_assignment(const LifecycleProblem& problem, const Eigen::VectorXd& house) {
  const DecisionLayout& L = problem.layout;
  if (house.size() != L.M) throw DomainError("house assignment must have length M");
  qp::QpProblem fixed = problem.qp;
  for (int j = 1; j <= L.M; ++j) {
    fixed.lb(L.house(j)) = house(j - 1);
    fixed.ub(L.house(j)) = house(j - 1);
  }
  return qp::solve_qp_maximize(fixed);
}

LifecyclePlan solve_lifecycle(const LifecycleConfig& config, const RiskyAssetSummary& asset, std::uint64_t seed) {
  config.validate();
  validate_asset(asset);
  const int M = config.years_M;
  const int kstart = planner_kstart(config, seed);
  const double V = planner_discount_factor(config, seed);
  const LifecycleProblem problem = build_lifecycle_problem(config, asset, kstart, V);
  const DecisionLayout& L = problem.layout;

  // The zero plan must be feasible: income alone covers the floor every year.
  for (int k = 1; k <= M; ++k) {
    if (problem.qp.bin(k - 1) > 1e-12) {
      std::ostringstream msg;
      msg << "infeasible configuration: income in year " << k << " does not cover d_floor = " << config.d_floor;
      throw DomainError(msg.str());
    }
  }

  std::vector<std::optional<int>> branches{std::nullopt};
  if (config.enable_house)
    for (int j = 1; j <= M - config.house_years; ++j) branches.emplace_back(j);

  LifecyclePlan plan;
  plan.layout = L;
  plan.kstart = kstart;
  plan.discount_factor = V;
  std::optional<std::size_t> best;
  Eigen::VectorXd best_x;

  for (const auto& year : branches) {
    Eigen::VectorXd house = Eigen::VectorXd::Zero(M);
    if (year) house(*year - 1) = 1.0;
    qp::QpSolution sol;
    try {
      sol = solve_with_house_assignment(problem, house);
    } catch (const qp::QpError& e) {
      throw DomainError("branch " + branch_label(year) + ": " + e.what());
    }
    if (sol.status == qp::QpStatus::unbounded)
      throw DomainError("branch " + branch_label(year) + ": objective is unbounded");
    plan.branches.push_back({year, sol.status, sol.objective});
    if (sol.status != qp::QpStatus::optimal) continue;
    if (!best || sol.objective > plan.branches[*best].objective) {
      best = plan.branches.size() - 1;
      best_x = sol.x;
    }
  }
  if (!best) throw DomainError("all house branches are infeasible");

  for (Eigen::Index i = 0; i < best_x.size(); ++i)
    if (best_x(i) < kDecisionDust) best_x(i) = 0.0;
  plan.decision = std::move(best_x);
  plan.house_year = plan.branches[*best].house_year;
  plan.objective = problem.qp.objective(plan.decision);
  plan.consumption = implied_consumption(plan.decision, config, asset, kstart);
  plan.feasibility_report = problem.qp.max_violation(plan.decision);
  return plan;
}

Eigen::VectorXd implied_consumption(const Eigen::VectorXd& decision, const LifecycleConfig& config,
                                    const RiskyAssetSummary& asset, int kstart) {
  const int M = config.years_M;
  const DecisionLayout L{M};
  if (decision.size() != L.size()) throw DomainError("decision vector has the wrong length");

  // Payments due in year k from a purchase in year j.
  auto payment = [&](int k, int j) {
    if (k == j) return config.house_initial * std::exp(j * config.house_growth);
    if (k > j && k <= j + config.house_years) return config.house_annual;
    return 0.0;
  };

  Eigen::VectorXd D(M);
  for (int k = 1; k <= M; ++k) {
    const bool before_drop = k < kstart;
    double d = before_drop ? config.income_high : config.income_low;
    if (k == 1) d += config.initial_saving;
    d += -decision(L.stock(k)) + decision(L.borrow(k)) - decision(L.save(k));
    if (k > 1) {
      d += (1.0 + asset.r_stock) * decision(L.stock(k - 1));
      d -= (1.0 + config.r_borrow) * decision(L.borrow(k - 1));
      d += (1.0 + config.r_save) * decision(L.save(k - 1));
    }
    for (int j = 1; j <= M; ++j) d -= payment(k, j) * decision(L.house(j));
    if (before_drop) d -= config.hazard.s * decision(L.insurance());
    D(k - 1) = d;
  }
  return D;
}

}  // namespace lifeplan
