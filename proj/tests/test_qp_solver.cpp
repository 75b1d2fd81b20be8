#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "lifeplan/qp_solver.hpp"
#include "oracles.hpp"

using lifeplan::qp::QpError;
using lifeplan::qp::QpProblem;
using lifeplan::qp::QpStatus;
using lifeplan::qp::solve_qp;
using lifeplan::qp::solve_qp_maximize;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_kkt(const QpProblem& p, const lifeplan::qp::QpSolution& s) {
  REQUIRE(s.status == QpStatus::optimal);
  const double cscale = 1.0 + p.c.cwiseAbs().maxCoeff();
  CHECK(lifeplan::qp::stationarity_residual(p, s) <= 1e-6 * cscale);
  CHECK(lifeplan::qp::complementarity_residual(p, s) <= 1e-6);
  const double bscale = 1.0 + std::max(p.beq.size() ? p.beq.cwiseAbs().maxCoeff() : 0.0,
                                       p.bin.size() ? p.bin.cwiseAbs().maxCoeff() : 0.0);
  CHECK(s.max_violation <= 1e-7 * bscale);
  CHECK(s.objective == doctest::Approx(p.objective(s.x)).epsilon(1e-9));
}

}  // namespace

TEST_CASE("active lower bound") {
  QpProblem p = QpProblem::free(1);
  p.Q(0, 0) = 2.0;
  p.lb(0) = 1.0;
  const auto s = solve_qp(p);
  require_kkt(p, s);
  CHECK(s.x(0) == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.bound_multipliers(0) == doctest::Approx(2.0));
}

TEST_CASE("symmetric projection onto a hyperplane") {
  QpProblem p = QpProblem::free(2);
  p.Q = Eigen::Matrix2d::Identity();
  p.Aeq = Eigen::RowVector2d(1.0, 1.0);
  p.beq = Eigen::VectorXd::Constant(1, 1.0);
  const auto s = solve_qp(p);
  require_kkt(p, s);
  CHECK(s.x(0) == doctest::Approx(0.5));
  CHECK(s.x(1) == doctest::Approx(0.5));
  CHECK(s.objective == doctest::Approx(0.25));
}

TEST_CASE("linear descent ray is unbounded") {
  QpProblem p = QpProblem::free(1);
  p.c(0) = -1.0;
  p.lb(0) = 0.0;
  const auto s = solve_qp(p);
  CHECK(s.status == QpStatus::unbounded);
  REQUIRE(s.ray.size() == 1);
  CHECK(s.ray(0) > 0.0);
}

TEST_CASE("two-asset target-mean variance program") {
  QpProblem p = QpProblem::free(2);
  p.Q = Eigen::Vector2d(0.08, 0.18).asDiagonal();
  p.Aeq.resize(2, 2);
  p.Aeq << 1.0, 1.0, 0.10, 0.05;
  p.beq = Eigen::Vector2d(1.0, 0.075);
  const auto s = solve_qp(p);
  require_kkt(p, s);
  CHECK(s.x(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.x(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(0.0325).epsilon(1e-12));
}

TEST_CASE("maximization") {
  SUBCASE("vertex of a parabola") {
    QpProblem p = QpProblem::free(1);
    p.Q(0, 0) = -2.0;
    p.c(0) = 2.0;
    const auto s = solve_qp_maximize(p);
    REQUIRE(s.status == QpStatus::optimal);
    CHECK(s.x(0) == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(1.0));
  }
  SUBCASE("LP over the unit box picks the sign pattern of c") {
    QpProblem p = QpProblem::free(5);
    p.c << 1.0, -2.0, 0.5, -0.1, 3.0;
    p.lb.setZero();
    p.ub.setOnes();
    const auto s = solve_qp_maximize(p);
    REQUIRE(s.status == QpStatus::optimal);
    for (int i = 0; i < 5; ++i) CHECK(s.x(i) == (p.c(i) > 0 ? 1.0 : 0.0));
    CHECK(s.objective == doctest::Approx(4.5));
  }
  SUBCASE("negation round trip") {
    std::mt19937_64 rng(11);
    QpProblem p = oracle::random_boxed_qp(rng, 4, 1, 1);
    QpProblem neg = p;
    neg.Q = -p.Q;
    neg.c = -p.c;
    const auto smin = solve_qp(p);
    const auto smax = solve_qp_maximize(neg);
    REQUIRE(smin.status == QpStatus::optimal);
    REQUIRE(smax.status == QpStatus::optimal);
    CHECK(smax.objective == doctest::Approx(-smin.objective).epsilon(1e-12));
  }
}

TEST_CASE("infeasible systems are detected") {
  QpProblem p = QpProblem::free(2);
  p.Q = Eigen::Matrix2d::Identity();
  p.lb.setZero();
  p.ub.setOnes();
  p.Aeq = Eigen::RowVector2d(1.0, 1.0);
  p.beq = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(solve_qp(p).status == QpStatus::infeasible);

  QpProblem q = QpProblem::free(1);
  q.Ain.resize(2, 1);
  q.Ain << 1.0, -1.0;
  q.bin = Eigen::Vector2d(2.0, -1.0);  // x >= 2 and x <= 1
  CHECK(solve_qp(q).status == QpStatus::infeasible);
}

TEST_CASE("malformed problems throw") {
  QpProblem p = QpProblem::free(2);
  p.Q(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_qp(p), QpError);

  QpProblem d = QpProblem::free(2);
  d.c.resize(3);
  d.c.setZero();
  CHECK_THROWS_AS(solve_qp(d), QpError);

  QpProblem b = QpProblem::free(1);
  b.lb(0) = 1.0;
  b.ub(0) = 0.0;
  CHECK_THROWS_AS(solve_qp(b), QpError);
}

TEST_CASE("iteration limit is reported distinctly") {
  std::mt19937_64 rng(5);
  QpProblem p = oracle::random_boxed_qp(rng, 6, 1, 2);
  lifeplan::qp::QpOptions opt;
  opt.max_iterations = 1;
  CHECK_THROWS_AS(solve_qp(p, opt), QpError);
}

TEST_CASE("singular Hessian: linear pieces move to the blocking constraint") {
  // min (x-1)^2 - y  s.t. x + y <= 3, y >= 0  -> x = 0.5, y = 2.5 (y has zero curvature)
  QpProblem p = QpProblem::free(2);
  p.Q(0, 0) = 2.0;
  p.c << -2.0, -1.0;
  p.Ain = Eigen::RowVector2d(-1.0, -1.0);
  p.bin = Eigen::VectorXd::Constant(1, -3.0);
  p.lb(1) = 0.0;
  const auto s = solve_qp(p);
  require_kkt(p, s);
  CHECK(s.x(0) == doctest::Approx(0.5));
  CHECK(s.x(1) == doctest::Approx(2.5));
}

TEST_CASE("degenerate optimal face is flagged") {
  // min (x+y)^2 on x+y >= 1, x,y >= 0: every point of the segment is optimal.
  QpProblem p = QpProblem::free(2);
  p.Q = Eigen::Matrix2d::Constant(2.0);
  p.Ain = Eigen::RowVector2d(1.0, 1.0);
  p.bin = Eigen::VectorXd::Constant(1, 1.0);
  p.lb.setZero();
  const auto s = solve_qp(p);
  require_kkt(p, s);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK_FALSE(s.unique);
}

TEST_CASE("random boxed QPs agree with the active-set enumeration oracle") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + trial % 6;
    const int n_eq = (trial % 3 == 0 && n > 1) ? 1 : 0;
    const int n_in = trial % 4 == 1 ? 2 : (trial % 4 == 2 ? 1 : 0);
    QpProblem p = oracle::random_boxed_qp(rng, n, n_eq, n_in);
    const auto expected = oracle::enumerate_active_sets(p);
    const auto s = solve_qp(p);
    CAPTURE(trial);
    if (!expected.feasible) {
      CHECK(s.status == QpStatus::infeasible);
      continue;
    }
    require_kkt(p, s);
    CHECK(std::abs(s.objective - expected.objective) <= 1e-6 * (1.0 + std::abs(expected.objective)));
  }
}

TEST_CASE("positive row scaling leaves the solution unchanged") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    QpProblem p = oracle::random_boxed_qp(rng, 5, 1, 2);
    const auto base = solve_qp(p);
    if (base.status != QpStatus::optimal) continue;
    QpProblem scaled = p;
    const Eigen::VectorXd k = oracle::random_vector(rng, 3, 0.01, 100.0);
    scaled.Aeq.row(0) *= k(0);
    scaled.beq(0) *= k(0);
    for (int i = 0; i < 2; ++i) {
      scaled.Ain.row(i) *= k(i + 1);
      scaled.bin(i) *= k(i + 1);
    }
    const auto s = solve_qp(scaled);
    REQUIRE(s.status == QpStatus::optimal);
    CHECK((s.x - base.x).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("semidefinite instances satisfy KKT") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 9;
    QpProblem p = QpProblem::free(n);
    // Rank-deficient PSD Hessian with finite box so the program stays bounded.
    Eigen::MatrixXd G = Eigen::MatrixXd::Random(n, std::max(1, n / 2));
    p.Q = G * G.transpose();
    p.c = oracle::random_vector(rng, n, -1.0, 1.0);
    p.lb = Eigen::VectorXd::Constant(n, -1.0);
    p.ub = Eigen::VectorXd::Constant(n, 2.0);
    p.Ain = Eigen::RowVectorXd::Ones(n);
    p.bin = Eigen::VectorXd::Constant(1, 0.5);
    const auto s = solve_qp(p);
    CAPTURE(trial);
    require_kkt(p, s);
  }
}
