#include "lifeplan/constrained_portfolio.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lifeplan/qp_solver.hpp"

namespace lifeplan {

namespace {

using qp::QpProblem;
using qp::QpSolution;
using qp::QpStatus;

// Among all optimal points of `p` (which share Q x for a convex QP), return
// the one of minimum Euclidean norm. Falls back to `sol.x` if the selection
// program fails numerically.
Eigen::VectorXd min_norm_on_optimal_face(const QpProblem& p, const QpSolution& sol) {
  const Eigen::Index n = p.size();
  QpProblem face = p;
  face.Q = Eigen::MatrixXd::Identity(n, n);
  face.c = Eigen::VectorXd::Zero(n);
  const Eigen::Index m = p.Aeq.rows();
  face.Aeq.resize(m + n, n);
  face.beq.resize(m + n);
  if (m > 0) {
    face.Aeq.topRows(m) = p.Aeq;
    face.beq.head(m) = p.beq;
  }
  face.Aeq.bottomRows(n) = p.Q;
  face.beq.tail(n) = p.Q * sol.x;
  try {
    const QpSolution refined = qp::solve_qp(face);
    if (refined.status == QpStatus::optimal &&
        std::abs(p.objective(refined.x) - sol.objective) <= 1e-10 * (1.0 + std::abs(sol.objective))) {
      return refined.x;
    }
  } catch (const qp::QpError&) {
  }
  return sol.x;
}

Eigen::VectorXd clean_weights(Eigen::VectorXd w) {
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) < kWeightDust) w(i) = 0.0;
  const double total = w.sum();
  if (!(total > 0.0)) throw DomainError("long-only solution has no positive weight");
  return w / total;
}

QpProblem simplex_variance_problem(const AssetStats& stats) {
  const Eigen::Index n = stats.size();
  QpProblem p = QpProblem::free(n);
  p.Q = 2.0 * stats.sigma;
  p.Aeq = Eigen::RowVectorXd::Ones(n);
  p.beq = Eigen::VectorXd::Ones(1);
  p.lb = Eigen::VectorXd::Zero(n);
  return p;
}

FrontierPoint solve_frontier_problem(const AssetStats& stats, const QpProblem& p, double mu_target) {
  const QpSolution sol = qp::solve_qp(p);
  if (sol.status != QpStatus::optimal) {
    std::ostringstream msg;
    msg << "long-only variance program is " << qp::to_string(sol.status) << " at target mean " << mu_target;
    throw DomainError(msg.str());
  }
  FrontierPoint pt;
  pt.mu_target = mu_target;
  pt.weights = clean_weights(sol.unique ? sol.x : min_norm_on_optimal_face(p, sol));
  pt.mean = stats.mu.dot(pt.weights);
  pt.variance = std::max(0.0, pt.weights.dot(stats.sigma * pt.weights));
  return pt;
}

}  // namespace

PortfolioWeights max_sharpe_long_only(const AssetStats& stats, double r_f) {
  const Eigen::Index n = stats.size();
  const Eigen::VectorXd excess = stats.mu - Eigen::VectorXd::Constant(n, r_f);
  if (!(excess.maxCoeff() > 0.0)) {
    throw DomainError("no asset beats the riskless rate: maximal long-only Sharpe ratio is not positive");
  }

  QpProblem p = QpProblem::free(n);
  p.Q = 2.0 * stats.sigma;
  p.Aeq = excess.transpose();
  p.beq = Eigen::VectorXd::Ones(1);
  p.lb = Eigen::VectorXd::Zero(n);

  const QpSolution sol = qp::solve_qp(p);
  if (sol.status != QpStatus::optimal) {
    throw DomainError(std::string("homogenized Sharpe program is ") + qp::to_string(sol.status));
  }
  const Eigen::VectorXd y = sol.unique ? sol.x : min_norm_on_optimal_face(p, sol);
  if (!(y.dot(stats.sigma * y) > 0.0)) {
    throw DomainError("a zero-variance long-only portfolio beats the riskless rate: Sharpe ratio is unbounded");
  }
  return evaluate_portfolio(stats, clean_weights(y), r_f);
}

FrontierPoint long_only_gmv(const AssetStats& stats) {
  return solve_frontier_problem(stats, simplex_variance_problem(stats), -std::numeric_limits<double>::infinity());
}

FrontierPoint min_variance_at_return(const AssetStats& stats, double mu_target) {
  const double top = stats.mu.maxCoeff();
  if (mu_target > top + 1e-12 * (1.0 + std::abs(top))) {
    std::ostringstream msg;
    msg << "target mean " << mu_target << " exceeds the largest expected return " << top
        << "; no long-only portfolio attains it";
    throw DomainError(msg.str());
  }
  QpProblem p = simplex_variance_problem(stats);
  p.Ain = stats.mu.transpose();
  p.bin = Eigen::VectorXd::Constant(1, std::min(mu_target, top));
  return solve_frontier_problem(stats, p, mu_target);
}

ConstrainedFrontier trace_frontier(const AssetStats& stats, int n_points) {
  if (n_points < 2) throw DomainError("a frontier needs at least 2 points");
  ConstrainedFrontier f;
  f.gmv_point = long_only_gmv(stats);
  const double lo = std::min(f.gmv_point.mean, stats.mu.maxCoeff());
  const double hi = stats.mu.maxCoeff();
  f.points.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t = i == n_points - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
    f.points.push_back(min_variance_at_return(stats, t));
  }
  return f;
}

}  // namespace lifeplan
