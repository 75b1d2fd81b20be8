#pragma once

/**
 * Dense convex quadratic programming.
 *
 *   minimize    1/2 x'Qx + c'x
 *   subject to  Aeq x  = beq
 *               Ain x >= bin
 *               lb <= x <= ub        (infinite bounds allowed)
 *
 * Q must be symmetric positive semidefinite. The solver is a primal
 * active-set method. A feasible start comes from a phase-1 LP on artificial
 * slacks. Inside a face, the reduced Hessian is eigendecomposed: directions of
 * zero curvature along which the objective decreases are followed to the
 * nearest blocking constraint, and reported as an unbounded ray when nothing
 * blocks; otherwise a (pseudo-inverse) Newton step is taken. Constraint
 * selection ties are broken by lowest index, bounds before general rows.
 *
 * Multiplier sign convention at an optimum:
 *   Qx + c = Aeq' lambda_eq + Ain' lambda_in + z,
 * with lambda_in >= 0 and z_j >= 0 on an active lower bound, z_j <= 0 on an
 * active upper bound, z_j = 0 for a variable strictly between its bounds.
 */

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lifeplan::qp {

/// Thrown for malformed problems and for iteration-limit exhaustion.
class QpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  /// n variables, no constraints, infinite bounds.
  static QpProblem free(Eigen::Index n);

  Eigen::Index size() const { return c.size(); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }

  /// Largest violation over equalities, inequalities and bounds.
  double max_violation(const Eigen::VectorXd& x) const;
};

enum class QpStatus { optimal, infeasible, unbounded };

const char* to_string(QpStatus status);

struct QpSolution {
  QpStatus status = QpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_violation = 0.0;

  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd bound_multipliers;

  /// Descent direction with no blocking constraint; set only when unbounded.
  Eigen::VectorXd ray;

  /// False when the reduced Hessian at the optimum is singular, i.e. the
  /// optimal face may hold more than one point.
  bool unique = true;
  int iterations = 0;
};

struct QpOptions {
  /// 0 selects 50 * (number of variables) per phase.
  int max_iterations = 0;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
};

QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

/// Maximizes 1/2 x'Qx + c'x for negative semidefinite Q. The reported
/// objective and the ray are in the maximization sense; multipliers refer to
/// the equivalent minimization of the negated objective.
QpSolution solve_qp_maximize(const QpProblem& problem, const QpOptions& options = {});

/// Infinity norm of the stationarity residual Qx + c - Aeq'l - Ain'm - z.
double stationarity_residual(const QpProblem& problem, const QpSolution& solution);

/// Largest complementary-slackness product over inequalities and bounds.
double complementarity_residual(const QpProblem& problem, const QpSolution& solution);

}  // namespace lifeplan::qp
