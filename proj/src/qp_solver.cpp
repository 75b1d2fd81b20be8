#include "lifeplan/qp_solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

namespace lifeplan::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// After this many consecutive zero-length steps, constraint release switches
// from the most negative multiplier to the lowest-index negative multiplier.
constexpr int kDegenerateStreak = 8;

enum class BoundState : std::uint8_t { free, lower, upper, fixed };

struct Stacked {
  Eigen::MatrixXd G;  // equality rows first, then inequality rows
  Eigen::VectorXd h;
  Eigen::Index n_eq = 0;
};

struct PhaseResult {
  QpStatus status = QpStatus::optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd row_multipliers;
  Eigen::VectorXd bound_multipliers;
  Eigen::VectorXd ray;
  bool unique = true;
  int iterations = 0;
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

class ActiveSet {
 public:
  ActiveSet(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, const Stacked& rows, const Eigen::VectorXd& lb,
            const Eigen::VectorXd& ub, const QpOptions& options)
      : Q_(Q), c_(c), rows_(rows), lb_(lb), ub_(ub), opt_(options), n_(c.size()) {
    q_scale_ = Q_.size() == 0 ? 0.0 : Q_.cwiseAbs().maxCoeff();
    row_norms_.resize(rows_.G.rows());
    for (Eigen::Index i = 0; i < rows_.G.rows(); ++i) row_norms_(i) = std::max(rows_.G.row(i).norm(), 1e-300);
  }

  PhaseResult run(Eigen::VectorXd x, int max_iterations) {
    x_ = std::move(x);
    initialize_working_set();

    PhaseResult result;
    int streak = 0;
    for (int iter = 0; iter < max_iterations; ++iter) {
      result.iterations = iter + 1;
      collect_free();
      const Eigen::MatrixXd AW = working_matrix();
      const Eigen::VectorXd g = Q_ * x_ + c_;
      const Eigen::VectorXd gF = gather(g);
      const Eigen::Index nf = static_cast<Eigen::Index>(free_.size());

      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
      Eigen::MatrixXd Z;
      if (AW.rows() > 0 && nf > 0) {
        qr.setThreshold(1e-11);
        qr.compute(AW.transpose());
        const Eigen::Index r = qr.rank();
        const Eigen::MatrixXd full = qr.householderQ();
        Z = full.rightCols(nf - r);
      } else {
        Z = Eigen::MatrixXd::Identity(nf, nf);
      }

      Eigen::VectorXd pF = Eigen::VectorXd::Zero(nf);
      bool zero_curvature = false;
      bool singular_face = false;
      bool stationary = true;
      if (Z.cols() > 0) {
        const Eigen::MatrixXd QFF = gather(Q_);
        const Eigen::MatrixXd HZ = Z.transpose() * QFF * Z;
        const Eigen::VectorXd gZ = Z.transpose() * gF;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(HZ);
        const Eigen::VectorXd& lam = es.eigenvalues();
        const Eigen::MatrixXd& U = es.eigenvectors();
        const double eig_tol = 1e-11 * std::max(lam.cwiseAbs().maxCoeff(), q_scale_);
        const Eigen::VectorXd proj = U.transpose() * gZ;
        Eigen::VectorXd flat = Eigen::VectorXd::Zero(lam.size());
        Eigen::VectorXd newton = Eigen::VectorXd::Zero(lam.size());
        for (Eigen::Index k = 0; k < lam.size(); ++k) {
          if (lam(k) <= eig_tol) {
            singular_face = true;
            flat(k) = proj(k);
          } else {
            newton(k) = proj(k) / lam(k);
          }
        }
        const double gtol = opt_.optimality_tol * (1.0 + inf_norm(gF));
        if (inf_norm(gZ) > gtol) {
          stationary = false;
          if (inf_norm(flat) > gtol) {
            zero_curvature = true;
            pF = -(Z * (U * flat));
          } else {
            pF = -(Z * (U * newton));
          }
        }
      }

      if (stationary) {
        const auto drop = release_candidate(AW, qr, g, gF, streak >= kDegenerateStreak, result);
        if (!drop) {
          result.status = QpStatus::optimal;
          result.x = x_;
          result.unique = !singular_face && !weakly_active_face_is_flat(result);
          return result;
        }
        streak = 0;
        continue;
      }

      // Ratio test: bounds first, then inequality rows, lowest index on ties.
      double alpha = zero_curvature ? kInf : 1.0;
      int block_kind = 0;  // 0 none, 1 lower bound, 2 upper bound, 3 row
      Eigen::Index block_index = -1;
      const double pscale = inf_norm(pF);
      for (Eigen::Index f = 0; f < nf; ++f) {
        const Eigen::Index j = free_[f];
        const double pj = pF(f);
        if (pj < -1e-14 * pscale && std::isfinite(lb_(j))) {
          const double a = std::max(0.0, x_(j) - lb_(j)) / -pj;
          if (a < alpha) { alpha = a; block_kind = 1; block_index = j; }
        } else if (pj > 1e-14 * pscale && std::isfinite(ub_(j))) {
          const double a = std::max(0.0, ub_(j) - x_(j)) / pj;
          if (a < alpha) { alpha = a; block_kind = 2; block_index = j; }
        }
      }
      for (Eigen::Index i = rows_.n_eq; i < rows_.G.rows(); ++i) {
        if (in_working_[i]) continue;
        double ap = 0.0;
        for (Eigen::Index f = 0; f < nf; ++f) ap += rows_.G(i, free_[f]) * pF(f);
        if (ap < -1e-12 * row_norms_(i) * pscale) {
          const double slack = std::max(0.0, rows_.G.row(i).dot(x_) - rows_.h(i));
          const double a = slack / -ap;
          if (a < alpha) { alpha = a; block_kind = 3; block_index = i; }
        }
      }

      if (!std::isfinite(alpha)) {
        result.status = QpStatus::unbounded;
        result.x = x_;
        result.ray = scatter(pF);
        return result;
      }

      for (Eigen::Index f = 0; f < nf; ++f) x_(free_[f]) += alpha * pF(f);
      switch (block_kind) {
        case 1: x_(block_index) = lb_(block_index); state_[block_index] = BoundState::lower; break;
        case 2: x_(block_index) = ub_(block_index); state_[block_index] = BoundState::upper; break;
        case 3: in_working_[block_index] = true; break;
        default: break;
      }
      streak = (alpha == 0.0) ? streak + 1 : 0;
    }

    std::ostringstream msg;
    msg << "active-set iteration limit (" << max_iterations << ") exceeded";
    throw QpError(msg.str());
  }

 private:
  void initialize_working_set() {
    state_.assign(static_cast<std::size_t>(n_), BoundState::free);
    in_working_.assign(static_cast<std::size_t>(rows_.G.rows()), false);
    for (Eigen::Index i = 0; i < rows_.n_eq; ++i) in_working_[i] = true;

    const double tol = opt_.feasibility_tol;
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (lb_(j) == ub_(j)) {
        x_(j) = lb_(j);
        state_[j] = BoundState::fixed;
      } else if (std::isfinite(lb_(j)) && near(x_(j), lb_(j), tol)) {
        x_(j) = lb_(j);
        candidates.push_back(j);
      } else if (std::isfinite(ub_(j)) && near(x_(j), ub_(j), tol)) {
        x_(j) = ub_(j);
        candidates.push_back(j);
      }
    }
    if (rows_.n_eq == 0) {
      for (Eigen::Index j : candidates) state_[j] = x_(j) == lb_(j) ? BoundState::lower : BoundState::upper;
      return;
    }
    // Keep the working set linearly independent: a bound joins only if the
    // equality rows restricted to the remaining free columns keep their rank.
    Eigen::Index base_rank = equality_rank();
    for (Eigen::Index j : candidates) {
      state_[j] = x_(j) == lb_(j) ? BoundState::lower : BoundState::upper;
      const Eigen::Index r = equality_rank();
      if (r < base_rank) state_[j] = BoundState::free;
    }
  }

  Eigen::Index equality_rank() {
    collect_free();
    if (free_.empty()) return 0;
    Eigen::MatrixXd E(rows_.n_eq, static_cast<Eigen::Index>(free_.size()));
    for (Eigen::Index i = 0; i < rows_.n_eq; ++i)
      for (std::size_t f = 0; f < free_.size(); ++f) E(i, static_cast<Eigen::Index>(f)) = rows_.G(i, free_[f]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    qr.setThreshold(1e-11);
    qr.compute(E);
    return qr.rank();
  }

  void collect_free() {
    free_.clear();
    for (Eigen::Index j = 0; j < n_; ++j)
      if (state_[j] == BoundState::free) free_.push_back(j);
    working_rows_.clear();
    for (Eigen::Index i = 0; i < rows_.G.rows(); ++i)
      if (in_working_[i]) working_rows_.push_back(i);
  }

  Eigen::MatrixXd working_matrix() const {
    Eigen::MatrixXd AW(static_cast<Eigen::Index>(working_rows_.size()), static_cast<Eigen::Index>(free_.size()));
    for (std::size_t r = 0; r < working_rows_.size(); ++r)
      for (std::size_t f = 0; f < free_.size(); ++f)
        AW(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = rows_.G(working_rows_[r], free_[f]);
    return AW;
  }

  Eigen::VectorXd gather(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t f = 0; f < free_.size(); ++f) out(static_cast<Eigen::Index>(f)) = v(free_[f]);
    return out;
  }

  Eigen::MatrixXd gather(const Eigen::MatrixXd& M) const {
    const auto nf = static_cast<Eigen::Index>(free_.size());
    Eigen::MatrixXd out(nf, nf);
    for (Eigen::Index a = 0; a < nf; ++a)
      for (Eigen::Index b = 0; b < nf; ++b) out(a, b) = M(free_[a], free_[b]);
    return out;
  }

  Eigen::VectorXd scatter(const Eigen::VectorXd& vF) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    for (std::size_t f = 0; f < free_.size(); ++f) out(free_[f]) = vF(static_cast<Eigen::Index>(f));
    return out;
  }

  // Computes multipliers at a stationary point of the current face. Releases
  // one constraint with a negative multiplier and returns true, or fills the
  // result's multipliers and returns false when all signs are correct.
  bool release_candidate(const Eigen::MatrixXd& AW, const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                         const Eigen::VectorXd& g, const Eigen::VectorXd& gF, bool bland, PhaseResult& result) {
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(working_rows_.size()));
    if (AW.rows() > 0) {
      if (AW.cols() > 0) {
        lam = qr.solve(gF);
      }
    }
    Eigen::VectorXd z = g;
    Eigen::VectorXd row_mult = Eigen::VectorXd::Zero(rows_.G.rows());
    for (std::size_t r = 0; r < working_rows_.size(); ++r) {
      const Eigen::Index i = working_rows_[r];
      row_mult(i) = lam(static_cast<Eigen::Index>(r));
      z.noalias() -= row_mult(i) * rows_.G.row(i).transpose();
    }
    for (Eigen::Index f : free_) z(f) = 0.0;

    const double tol = 1e3 * opt_.optimality_tol * (1.0 + inf_norm(g));
    double worst = -tol;
    int kind = 0;
    Eigen::Index index = -1;
    auto consider = [&](double scaled, int k, Eigen::Index idx) {
      if (scaled >= -tol) return;
      if (bland) {
        if (kind == 0) { worst = scaled; kind = k; index = idx; }
      } else if (scaled < worst) {
        worst = scaled; kind = k; index = idx;
      }
    };
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (state_[j] == BoundState::lower) consider(z(j), 1, j);
      else if (state_[j] == BoundState::upper) consider(-z(j), 2, j);
    }
    for (Eigen::Index i = rows_.n_eq; i < rows_.G.rows(); ++i)
      if (in_working_[i]) consider(row_mult(i) * row_norms_(i), 3, i);

    if (kind == 0) {
      result.row_multipliers = row_mult;
      result.bound_multipliers = z;
      return false;
    }
    if (kind == 3) in_working_[index] = false;
    else state_[index] = BoundState::free;
    return true;
  }

  // True when the face cut out by equalities, fixed variables and the
  // constraints with strictly positive multipliers has a direction of zero
  // curvature, so the optimum need not be unique.
  bool weakly_active_face_is_flat(const PhaseResult& r) const {
    const double tol = 1e3 * opt_.optimality_tol * (1.0 + inf_norm(r.bound_multipliers));
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n_; ++j) {
      const bool pinned = state_[j] == BoundState::fixed ||
                          (state_[j] != BoundState::free && std::abs(r.bound_multipliers(j)) > tol);
      if (!pinned) cols.push_back(j);
    }
    if (cols.empty()) return false;
    std::vector<Eigen::Index> strong;
    for (Eigen::Index i = 0; i < rows_.G.rows(); ++i)
      if (i < rows_.n_eq || (in_working_[i] && r.row_multipliers(i) * row_norms_(i) > tol)) strong.push_back(i);
    const auto nc = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(nc, nc);
    if (!strong.empty()) {
      Eigen::MatrixXd At(nc, static_cast<Eigen::Index>(strong.size()));
      for (std::size_t k = 0; k < strong.size(); ++k)
        for (Eigen::Index a = 0; a < nc; ++a) At(a, static_cast<Eigen::Index>(k)) = rows_.G(strong[k], cols[a]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
      qr.setThreshold(1e-11);
      qr.compute(At);
      const Eigen::MatrixXd full = qr.householderQ();
      Z = full.rightCols(nc - qr.rank());
    }
    if (Z.cols() == 0) return false;
    Eigen::MatrixXd QC(nc, nc);
    for (Eigen::Index a = 0; a < nc; ++a)
      for (Eigen::Index b = 0; b < nc; ++b) QC(a, b) = Q_(cols[a], cols[b]);
    const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Z.transpose() * QC * Z).eigenvalues();
    return lam.minCoeff() <= 1e-11 * std::max(lam.cwiseAbs().maxCoeff(), q_scale_);
  }

  const Eigen::MatrixXd& Q_;
  const Eigen::VectorXd& c_;
  const Stacked& rows_;
  const Eigen::VectorXd& lb_;
  const Eigen::VectorXd& ub_;
  const QpOptions& opt_;
  Eigen::Index n_;
  double q_scale_ = 0.0;
  Eigen::VectorXd row_norms_;

  Eigen::VectorXd x_;
  std::vector<BoundState> state_;
  std::vector<bool> in_working_;
  std::vector<Eigen::Index> free_;
  std::vector<Eigen::Index> working_rows_;
};

void validate(const QpProblem& p) {
  const Eigen::Index n = p.c.size();
  auto fail = [](const std::string& what) { throw QpError("invalid QP: " + what); };
  if (n == 0) fail("no variables");
  if (p.Q.rows() != n || p.Q.cols() != n) fail("Q must be n x n with n = size(c)");
  if (p.Aeq.rows() > 0 && p.Aeq.cols() != n) fail("Aeq column count differs from n");
  if (p.Aeq.rows() != p.beq.size()) fail("Aeq rows differ from size(beq)");
  if (p.Ain.rows() > 0 && p.Ain.cols() != n) fail("Ain column count differs from n");
  if (p.Ain.rows() != p.bin.size()) fail("Ain rows differ from size(bin)");
  if (p.lb.size() != 0 && p.lb.size() != n) fail("lb size differs from n");
  if (p.ub.size() != 0 && p.ub.size() != n) fail("ub size differs from n");
  if (!p.Q.allFinite() || !p.c.allFinite()) fail("non-finite entry in Q or c");
  if ((p.Aeq.rows() > 0 && !p.Aeq.allFinite()) || !p.beq.allFinite()) fail("non-finite equality data");
  if ((p.Ain.rows() > 0 && !p.Ain.allFinite()) || !p.bin.allFinite()) fail("non-finite inequality data");
  const double qmax = p.Q.cwiseAbs().maxCoeff();
  if ((p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, qmax)) fail("Q is not symmetric");
  if (p.lb.size() == n && p.ub.size() == n) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::isnan(p.lb(j)) || std::isnan(p.ub(j)) || p.lb(j) > p.ub(j)) {
        std::ostringstream msg;
        msg << "bounds of variable " << j << " are inconsistent";
        fail(msg.str());
      }
    }
  }
}

Stacked stack_rows(const QpProblem& p) {
  const Eigen::Index n = p.c.size();
  Stacked s;
  s.n_eq = p.Aeq.rows();
  s.G.resize(p.Aeq.rows() + p.Ain.rows(), n);
  s.h.resize(s.G.rows());
  if (p.Aeq.rows() > 0) {
    s.G.topRows(p.Aeq.rows()) = p.Aeq;
    s.h.head(p.Aeq.rows()) = p.beq;
  }
  if (p.Ain.rows() > 0) {
    s.G.bottomRows(p.Ain.rows()) = p.Ain;
    s.h.tail(p.Ain.rows()) = p.bin;
  }
  return s;
}

}  // namespace

QpProblem QpProblem::free(Eigen::Index n) {
  QpProblem p;
  p.Q = Eigen::MatrixXd::Zero(n, n);
  p.c = Eigen::VectorXd::Zero(n);
  p.Aeq.resize(0, n);
  p.Ain.resize(0, n);
  p.lb = Eigen::VectorXd::Constant(n, -kInf);
  p.ub = Eigen::VectorXd::Constant(n, kInf);
  return p;
}

double QpProblem::max_violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  if (Aeq.rows() > 0) v = std::max(v, inf_norm(Aeq * x - beq));
  if (Ain.rows() > 0) v = std::max(v, (bin - Ain * x).cwiseMax(0.0).maxCoeff());
  if (lb.size() == x.size()) v = std::max(v, (lb - x).cwiseMax(0.0).maxCoeff());
  if (ub.size() == x.size()) v = std::max(v, (x - ub).cwiseMax(0.0).maxCoeff());
  return v;
}

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

QpSolution solve_qp(const QpProblem& problem, const QpOptions& options) {
  validate(problem);
  const Eigen::Index n = problem.c.size();
  const Eigen::VectorXd lb = problem.lb.size() == n ? problem.lb : Eigen::VectorXd::Constant(n, -kInf);
  const Eigen::VectorXd ub = problem.ub.size() == n ? problem.ub : Eigen::VectorXd::Constant(n, kInf);
  const Stacked rows = stack_rows(problem);
  const Eigen::Index m = rows.G.rows();
  const int cap_scale = 50;

  // Start from the point of the box closest to the origin.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n).cwiseMax(lb).cwiseMin(ub);
  const double b_scale = 1.0 + inf_norm(rows.h);
  const double feas = options.feasibility_tol * b_scale;

  QpSolution sol;
  int phase1_iterations = 0;

  // Phase 1: minimize the sum of artificial slacks on violated rows.
  std::vector<Eigen::Index> art_rows;
  std::vector<double> art_sign;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = rows.h(i) - rows.G.row(i).dot(x0);
    if (i < rows.n_eq ? std::abs(r) > feas : r > feas) {
      art_rows.push_back(i);
      art_sign.push_back(r >= 0.0 ? 1.0 : -1.0);
    }
  }
  if (!art_rows.empty()) {
    const auto k = static_cast<Eigen::Index>(art_rows.size());
    const Eigen::Index n1 = n + k;
    Stacked rows1;
    rows1.n_eq = rows.n_eq;
    rows1.G = Eigen::MatrixXd::Zero(m, n1);
    rows1.G.leftCols(n) = rows.G;
    rows1.h = rows.h;
    Eigen::VectorXd x1(n1);
    x1.head(n) = x0;
    for (Eigen::Index a = 0; a < k; ++a) {
      const Eigen::Index i = art_rows[static_cast<std::size_t>(a)];
      rows1.G(i, n + a) = art_sign[static_cast<std::size_t>(a)];
      x1(n + a) = std::abs(rows.h(i) - rows.G.row(i).dot(x0));
    }
    const Eigen::MatrixXd Q1 = Eigen::MatrixXd::Zero(n1, n1);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n1);
    c1.tail(k).setOnes();
    Eigen::VectorXd lb1(n1), ub1(n1);
    lb1 << lb, Eigen::VectorXd::Zero(k);
    ub1 << ub, Eigen::VectorXd::Constant(k, kInf);

    ActiveSet phase1(Q1, c1, rows1, lb1, ub1, options);
    const int cap = options.max_iterations > 0 ? options.max_iterations : cap_scale * static_cast<int>(n1);
    PhaseResult r1 = phase1.run(x1, cap);
    phase1_iterations = r1.iterations;
    const double residual = r1.x.tail(k).sum();
    if (residual > feas) {
      sol.status = QpStatus::infeasible;
      sol.x = r1.x.head(n);
      sol.objective = problem.objective(sol.x);
      sol.max_violation = problem.max_violation(sol.x);
      sol.iterations = phase1_iterations;
      return sol;
    }
    x0 = r1.x.head(n);
  }

  ActiveSet phase2(problem.Q, problem.c, rows, lb, ub, options);
  const int cap = options.max_iterations > 0 ? options.max_iterations : cap_scale * static_cast<int>(n);
  PhaseResult r2 = phase2.run(x0, cap);

  sol.status = r2.status;
  sol.x = r2.x;
  sol.iterations = phase1_iterations + r2.iterations;
  sol.objective = problem.objective(sol.x);
  sol.max_violation = problem.max_violation(sol.x);
  if (r2.status == QpStatus::unbounded) {
    sol.ray = r2.ray;
    return sol;
  }
  sol.unique = r2.unique;
  sol.eq_multipliers = r2.row_multipliers.head(rows.n_eq);
  sol.ineq_multipliers = r2.row_multipliers.tail(m - rows.n_eq);
  sol.bound_multipliers = r2.bound_multipliers;
  return sol;
}

QpSolution solve_qp_maximize(const QpProblem& problem, const QpOptions& options) {
  QpProblem negated = problem;
  negated.Q = -problem.Q;
  negated.c = -problem.c;
  QpSolution sol = solve_qp(negated, options);
  sol.objective = -sol.objective;
  return sol;
}

double stationarity_residual(const QpProblem& problem, const QpSolution& solution) {
  Eigen::VectorXd r = problem.Q * solution.x + problem.c;
  if (problem.Aeq.rows() > 0) r -= problem.Aeq.transpose() * solution.eq_multipliers;
  if (problem.Ain.rows() > 0) r -= problem.Ain.transpose() * solution.ineq_multipliers;
  if (solution.bound_multipliers.size() == r.size()) r -= solution.bound_multipliers;
  return inf_norm(r);
}

double complementarity_residual(const QpProblem& problem, const QpSolution& solution) {
  double worst = 0.0;
  const Eigen::VectorXd& x = solution.x;
  if (problem.Ain.rows() > 0) {
    const Eigen::VectorXd slack = problem.Ain * x - problem.bin;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      const double mu = solution.ineq_multipliers(i);
      worst = std::max({worst, -mu, std::abs(mu * slack(i))});
    }
  }
  const Eigen::VectorXd& z = solution.bound_multipliers;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const bool fixed = problem.lb.size() == x.size() && problem.lb(j) == problem.ub(j);
    if (fixed || z(j) == 0.0) continue;
    if (z(j) > 0.0) {
      const double gap = problem.lb.size() == x.size() ? x(j) - problem.lb(j) : kInf;
      worst = std::max(worst, std::isfinite(gap) ? std::abs(z(j) * gap) : std::abs(z(j)));
    } else {
      const double gap = problem.ub.size() == x.size() ? problem.ub(j) - x(j) : kInf;
      worst = std::max(worst, std::isfinite(gap) ? std::abs(z(j) * gap) : std::abs(z(j)));
    }
  }
  return worst;
}

}  // namespace lifeplan::qp
