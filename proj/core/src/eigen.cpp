#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "zerores/errors.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

namespace {

void require_square_symmetric(const Eigen::MatrixXd& a, const char* name) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError(std::string(name) + " must be a non-empty square matrix");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InputError(std::string(name) + " is not symmetric (asymmetry " + std::to_string(asym) +
                     ")");
  }
}

}  // namespace

EigSolution sym_eig_top(const Eigen::MatrixXd& a, int count, double tol) {
  require_square_symmetric(a, "matrix");
  const Eigen::Index n = a.rows();
  if (count < 1 || count > n) throw DomainError("requested eigenpair count out of range");

  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");

  EigSolution out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  out.residuals.resize(count);
  const double norm = std::max(solver.eigenvalues().cwiseAbs().maxCoeff(),
                               std::numeric_limits<double>::min());
  for (int c = 0; c < count; ++c) {
    const Eigen::Index idx = n - 1 - c;  // Eigen sorts ascending
    out.values(c) = solver.eigenvalues()(idx);
    out.vectors.col(c) = solver.eigenvectors().col(idx);
    out.residuals(c) =
        (sym * out.vectors.col(c) - out.values(c) * out.vectors.col(c)).norm() / norm;
    if (out.residuals(c) > tol) {
      throw AccuracyError("eigenpair residual " + std::to_string(out.residuals(c)) +
                          " exceeds tolerance");
    }
  }
  out.kept = n;
  return out;
}

OverlapReduction::OverlapReduction(const Eigen::MatrixXd& s, GenEigOptions options)
    : overlap_(s), options_(options) {
  require_square_symmetric(s, "overlap matrix");
  const Eigen::Index n = s.rows();
  const Eigen::VectorXd diag = s.diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw ConditioningError("overlap matrix has a non-positive diagonal entry");
  }
  const Eigen::VectorXd scale = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd equilibrated = scale.asDiagonal() * s * scale.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(equilibrated);
  if (solver.info() != Eigen::Success) throw ConvergenceError("overlap eigensolver failed");
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const double lmax = lam(n - 1);
  const double lmin = lam(0);
  condition_ = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

  if (!options_.prune) {
    if (!(condition_ <= options_.max_condition)) {
      throw ConditioningError("overlap matrix is numerically singular (condition " +
                              std::to_string(condition_) +
                              "); prune the basis by overlap-eigenvalue cutoff");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(equilibrated);
    if (llt.info() != Eigen::Success) {
      throw ConditioningError("Cholesky factorization of the overlap failed; prune the basis");
    }
    // X = D L^{-T}
    const Eigen::MatrixXd l_inv_t =
        llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
    transform_ = scale.asDiagonal() * l_inv_t;
    return;
  }

  const double cutoff = options_.prune_cutoff * lmax;
  Eigen::Index first = 0;
  while (first < n && lam(first) <= cutoff) ++first;
  const Eigen::Index kept = n - first;
  if (kept == 0) throw ConditioningError("overlap pruning removed the whole basis");
  transform_ = scale.asDiagonal() * solver.eigenvectors().rightCols(kept) *
               lam.tail(kept).cwiseSqrt().cwiseInverse().asDiagonal();
  condition_ = lmax / lam(first);
}

EigSolution OverlapReduction::lowest(const Eigen::MatrixXd& h, int count) const {
  require_square_symmetric(h, "Hamiltonian matrix");
  if (h.rows() != overlap_.rows()) throw InputError("H and S dimensions differ");
  const Eigen::Index m = transform_.cols();
  if (count < 1 || count > m) throw DomainError("requested eigenpair count out of range");

  Eigen::MatrixXd reduced = transform_.transpose() * h * transform_;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) throw ConvergenceError("reduced eigensolver failed");

  EigSolution out;
  out.values = solver.eigenvalues().head(count);
  out.vectors = transform_ * solver.eigenvectors().leftCols(count);
  out.residuals.resize(count);
  const double hnorm = std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (int c = 0; c < count; ++c) {
    const Eigen::VectorXd v = out.vectors.col(c);
    const double vnorm = std::max(v.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    out.residuals(c) = (h * v - out.values(c) * (overlap_ * v)).norm() / (hnorm * vnorm);
  }
  out.condition = condition_;
  out.kept = m;
  return out;
}

EigSolution gen_sym_eig_min(const Eigen::MatrixXd& h, const Eigen::MatrixXd& s,
                            GenEigOptions options) {
  const OverlapReduction reduction(s, options);
  return reduction.lowest(h, 1);
}

}  // namespace zerores
