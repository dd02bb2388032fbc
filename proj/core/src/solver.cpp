#include "dfnvem/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

// Block diagonal preconditioner: |diag| on the flux block, diagonal Schur estimate elsewhere.
class BlockDiagonal {
public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  BlockDiagonal() = default;

  template <typename Mat>
  BlockDiagonal& analyzePattern(const Mat&) { return *this; }
  template <typename Mat>
  BlockDiagonal& factorize(const Mat& A) { return compute(A); }

  template <typename Mat>
  BlockDiagonal& compute(const Mat& A) {
    const int n = int(A.rows());
    VecX d = VecX::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
      for (typename Mat::InnerIterator it(A, k); it; ++it)
        if (it.row() == it.col()) d[it.row()] = std::abs(it.value());
    VecX schur = VecX::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
      for (typename Mat::InnerIterator it(A, k); it; ++it) {
        const int r = int(it.row()), c = int(it.col());
        if (r == c || d[c] == 0.0) continue;
        schur[r] += it.value() * it.value() / d[c];
      }
    inv_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double v = d[i] > 0 ? d[i] : schur[i];
      inv_[i] = v > 0 ? 1.0 / v : 1.0;
    }
    return *this;
  }

  template <typename Rhs>
  VecX solve(const Rhs& b) const { return inv_.cwiseProduct(b); }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
  VecX inv_;
};

double relative_residual(const SystemMatrix& A, const VecX& x, const VecX& b) {
  const double nb = b.norm();
  const double r = (A * x - b).norm();
  return nb > 0 ? r / nb : r;
}

SolveReport solve_minres(const SystemMatrix& A, const VecX& b, const SolverOptions& opt) {
  Eigen::MINRES<SystemMatrix, Eigen::Lower | Eigen::Upper, BlockDiagonal> mr;
  mr.setTolerance(opt.tol);
  mr.setMaxIterations(opt.max_iterations);
  mr.compute(A);
  SolveReport rep;
  rep.x = mr.solve(b);
  rep.iterations = int(mr.iterations());
  rep.method = "minres";
  rep.residual = relative_residual(A, rep.x, b);
  if (!rep.x.allFinite()) throw SingularSystem("minres produced non-finite values");
  return rep;
}

}  // namespace

SolveReport solve(const SystemMatrix& A, const VecX& b, const SolverOptions& opt) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw SingularSystem("dimension mismatch");
  if (A.rows() == 0) return SolveReport{VecX(), 0.0, 0, "empty", false};
  if (opt.kind == SolverKind::minres) return solve_minres(A, b, opt);

  Eigen::SparseLU<SystemMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    if (opt.fallback) {
      SolveReport rep = solve_minres(A, b, opt);
      rep.nullspace = true;
      if (rep.residual > std::max(1e2 * opt.tol, 1e-8))
        throw SingularSystem("sparse LU failed and minres stalled at residual " + std::to_string(rep.residual));
      return rep;
    }
    throw SingularSystem("sparse LU failed: " + lu.lastErrorMessage());
  }
  SolveReport rep;
  rep.x = lu.solve(b);
  rep.method = "sparse-lu";
  if (!rep.x.allFinite()) throw SingularSystem("sparse LU produced non-finite values");
  rep.residual = relative_residual(A, rep.x, b);
  // One step of iterative refinement keeps the residual near machine precision on badly scaled systems.
  if (rep.residual > 1e-13) {
    const VecX r = b - A * rep.x;
    const VecX dx = lu.solve(r);
    const VecX x2 = rep.x + dx;
    const double r2 = relative_residual(A, x2, b);
    if (r2 < rep.residual) {
      rep.x = x2;
      rep.residual = r2;
      rep.iterations = 1;
    }
  }
  return rep;
}

SolveReport solve(const SaddleSystem& system, const SolverOptions& opt) {
  const auto& d = system.dofs;
  VecX colnorm = VecX::Zero(system.A.cols());
  for (int k = 0; k < system.A.outerSize(); ++k)
    for (SystemMatrix::InnerIterator it(system.A, k); it; ++it) colnorm[it.col()] += std::abs(it.value());
  for (int i = 0; i < colnorm.size(); ++i) {
    if (colnorm[i] > 0) continue;
    const char* block = i < d.n_flux ? "flux" : i < d.n_flux + d.n_pressure ? "pressure" : "multiplier";
    throw SingularSystem(std::string("empty column in the ") + block + " block at dof " + std::to_string(i));
  }
  return solve(system.A, system.b, opt);
}

}  // namespace dfn
