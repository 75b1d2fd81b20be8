#pragma once

// Test-only reference computations. Nothing here calls the active-set solver;
// these are the independent routes the library is checked against.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "lifeplan/lifecycle_planner.hpp"
#include "lifeplan/qp_solver.hpp"

namespace oracle {

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale = 1.0, double ridge = 0.05) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
  Eigen::MatrixXd S = G * G.transpose() / n + ridge * Eigen::MatrixXd::Identity(n, n);
  S = 0.5 * (S + S.transpose());
  return scale * S;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Equity-like statistics from a one-factor model: vols in [0.10, 0.40],
// loadings in [0.2, 0.9] (pairwise correlations roughly 0.04 to 0.81) and
// means in [mu_lo, mu_hi].
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> random_factor_stats(std::mt19937_64& rng, int n, double mu_lo = 0.02,
                                                                        double mu_hi = 0.15) {
  const Eigen::VectorXd vol = random_vector(rng, n, 0.10, 0.40);
  const Eigen::VectorXd beta = random_vector(rng, n, 0.2, 0.9);
  Eigen::MatrixXd corr = beta * beta.transpose();
  corr.diagonal().setOnes();
  Eigen::MatrixXd sigma = vol.asDiagonal() * corr * vol.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose());
  return {random_vector(rng, n, mu_lo, mu_hi), sigma};
}

// Strictly convex QP with a finite box, n_eq equality and n_in inequality rows.
inline lifeplan::qp::QpProblem random_boxed_qp(std::mt19937_64& rng, int n, int n_eq, int n_in) {
  lifeplan::qp::QpProblem p = lifeplan::qp::QpProblem::free(n);
  p.Q = random_spd(rng, n);
  p.c = random_vector(rng, n, -2.0, 2.0);
  p.lb = random_vector(rng, n, -1.5, -0.1);
  p.ub = random_vector(rng, n, 0.1, 1.5);
  if (n_eq > 0) {
    p.Aeq = Eigen::MatrixXd::Zero(n_eq, n);
    p.beq.resize(n_eq);
    for (int i = 0; i < n_eq; ++i) {
      p.Aeq.row(i) = random_vector(rng, n, -1.0, 1.0).transpose();
      p.beq(i) = 0.3 * random_vector(rng, 1, -1.0, 1.0)(0);
    }
  }
  if (n_in > 0) {
    p.Ain = Eigen::MatrixXd::Zero(n_in, n);
    p.bin.resize(n_in);
    for (int i = 0; i < n_in; ++i) {
      p.Ain.row(i) = random_vector(rng, n, -1.0, 1.0).transpose();
      p.bin(i) = random_vector(rng, 1, -0.5, 0.5)(0);
    }
  }
  return p;
}

struct EnumerationResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
};

// Global minimum of a strictly convex QP with finite box bounds, found by
// trying every assignment of {lower, upper, free} to the variables and
// {active, inactive} to the inequality rows, solving the resulting KKT system,
// and keeping the best feasible stationary point.
inline EnumerationResult enumerate_active_sets(const lifeplan::qp::QpProblem& p, double tol = 1e-9) {
  const int n = static_cast<int>(p.c.size());
  const int m_eq = static_cast<int>(p.Aeq.rows());
  const int m_in = static_cast<int>(p.Ain.rows());
  EnumerationResult best;

  long long var_combos = 1;
  for (int j = 0; j < n; ++j) var_combos *= 3;
  const long long row_combos = 1LL << m_in;

  std::vector<int> state(n);
  for (long long vc = 0; vc < var_combos; ++vc) {
    long long code = vc;
    for (int j = 0; j < n; ++j) { state[j] = static_cast<int>(code % 3); code /= 3; }
    for (long long rc = 0; rc < row_combos; ++rc) {
      std::vector<int> F;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        if (state[j] == 0) x(j) = p.lb(j);
        else if (state[j] == 1) x(j) = p.ub(j);
        else F.push_back(j);
      }
      std::vector<int> active_in;
      for (int i = 0; i < m_in; ++i)
        if (rc & (1LL << i)) active_in.push_back(i);
      const int nf = static_cast<int>(F.size());
      const int me = m_eq + static_cast<int>(active_in.size());
      // With nothing free the fixed point is simply checked for feasibility below.
      if (nf > 0) {
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + me, nf + me);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + me);
        for (int a = 0; a < nf; ++a) {
          for (int b = 0; b < nf; ++b) K(a, b) = p.Q(F[a], F[b]);
          double r = -p.c(F[a]);
          for (int j = 0; j < n; ++j)
            if (state[j] != 2) r -= p.Q(F[a], j) * x(j);
          rhs(a) = r;
        }
        auto row_of = [&](int e) -> Eigen::RowVectorXd {
          return e < m_eq ? Eigen::RowVectorXd(p.Aeq.row(e)) : Eigen::RowVectorXd(p.Ain.row(active_in[e - m_eq]));
        };
        auto rhs_of = [&](int e) { return e < m_eq ? p.beq(e) : p.bin(active_in[e - m_eq]); };
        for (int e = 0; e < me; ++e) {
          const Eigen::RowVectorXd a = row_of(e);
          double r = rhs_of(e);
          for (int j = 0; j < n; ++j)
            if (state[j] != 2) r -= a(j) * x(j);
          for (int f = 0; f < nf; ++f) {
            K(nf + e, f) = a(F[f]);
            K(f, nf + e) = a(F[f]);
          }
          rhs(nf + e) = r;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd sol = lu.solve(rhs);
        for (int f = 0; f < nf; ++f) x(F[f]) = sol(f);
      }
      if (p.max_violation(x) > tol * (1.0 + x.cwiseAbs().maxCoeff())) continue;
      const double obj = p.objective(x);
      if (obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        best.x = x;
      }
    }
  }
  return best;
}

inline double sharpe(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, const Eigen::VectorXd& w, double r_f) {
  const double var = w.dot(sigma * w);
  return (mu.dot(w) - r_f) / std::sqrt(var);
}

// Best Sharpe ratio over the 3-asset simplex on a grid with the given step.
inline double simplex_grid_sharpe(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, double r_f,
                                  double step = 0.01) {
  const int k = static_cast<int>(std::lround(1.0 / step));
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; a + b <= k; ++b) {
      Eigen::Vector3d w(a * step, b * step, (k - a - b) * step);
      const double var = w.dot(sigma * w);
      if (var <= 0.0) continue;
      best = std::max(best, (mu.dot(w) - r_f) / std::sqrt(var));
    }
  }
  return best;
}

// Small lifecycle instances (M in [3, 8]) that exercise every instrument.
// B >= 0.5 and var_stock >= 0.01 keep every branch bounded.
inline std::pair<lifeplan::LifecycleConfig, lifeplan::RiskyAssetSummary> random_lifecycle(std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  lifeplan::LifecycleConfig c;
  c.years_M = std::uniform_int_distribution<int>(3, 8)(rng);
  c.house_years = std::uniform_int_distribution<int>(1, c.years_M - 1)(rng);
  c.r = u(0.01, 0.06);
  c.r_save = u(0.0, 0.04);
  c.r_borrow = c.r_save + u(0.005, 0.06);
  c.income_high = u(100.0, 300.0);
  c.income_low = u(10.0, 60.0);
  c.d_floor = u(5.0, c.income_low);
  c.initial_saving = u(0.0, 600.0);
  c.risk_aversion_B = u(0.5, 5.0);
  c.house_initial = u(100.0, 1500.0);
  c.house_annual = u(10.0, 150.0);
  c.house_growth = u(0.0, 0.03);
  c.house_utility = u(0.0, 3000.0);
  c.hazard = lifeplan::HazardModel{u(0.05, 0.5), c.r, u(5.0, 40.0), u(0.1, 1.0), c.years_M};
  lifeplan::RiskyAssetSummary a{u(0.02, 0.12), u(0.01, 0.09)};
  return {c, a};
}

struct BruteForceResult {
  bool feasible = false;
  double objective = -std::numeric_limits<double>::infinity();
  std::optional<int> house_year;  // set when exactly one binary is on
  int feasible_patterns = 0;
};

// Best objective over every 0/1 house pattern inside the relaxed bounds;
// patterns with more than one purchase are left to the constraint rows.
inline BruteForceResult brute_force_house(const lifeplan::LifecycleProblem& problem) {
  const int M = problem.layout.M;
  BruteForceResult best;
  for (long long mask = 0; mask < (1LL << M); ++mask) {
    Eigen::VectorXd house = Eigen::VectorXd::Zero(M);
    bool within_bounds = true;
    int ones = 0;
    std::optional<int> year;
    for (int j = 1; j <= M; ++j) {
      if (!(mask & (1LL << (j - 1)))) continue;
      house(j - 1) = 1.0;
      ++ones;
      year = j;
      if (problem.qp.ub(problem.layout.house(j)) < 1.0) within_bounds = false;
    }
    if (!within_bounds) continue;
    const auto sol = lifeplan::solve_with_house_assignment(problem, house);
    if (sol.status != lifeplan::qp::QpStatus::optimal) continue;
    ++best.feasible_patterns;
    const double obj = problem.qp.objective(sol.x);
    if (obj > best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.house_year = ones == 1 ? year : std::nullopt;
    }
  }
  return best;
}

}  // namespace oracle
