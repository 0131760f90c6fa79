#pragma once

// Shared numerical kernels: Gauss-Legendre rules, dense symmetric and
// generalized eigensolvers, bracketed root finding and a radial ODE shooter.
// All functions are pure; nothing here keeps state between calls.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace zerores {

// ---------------------------------------------------------------- quadrature

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing inside (a, b)
  std::vector<double> weights;  // positive
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// N-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2N-1.
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss-Legendre panels between consecutive breakpoints (breaks[0] = a,
/// breaks.back() = b), `per_panel[i]` nodes on panel i.
QuadratureRule composite_gauss_legendre(std::span<const double> breaks,
                                        std::span<const int> per_panel);

// --------------------------------------------------------------- eigensolvers

struct EigSolution {
  Eigen::VectorXd values;     // descending for sym_eig_top, ascending for gen_sym_eig_min
  Eigen::MatrixXd vectors;    // one column per eigenvalue
  Eigen::VectorXd residuals;  // ||A v - lambda B v|| / ||A||
  double condition = 1.0;     // overlap condition number (generalized problems)
  Eigen::Index kept = 0;      // retained overlap dimension after pruning
};

/// Top `count` eigenpairs of a symmetric matrix, by algebraic value.
/// Throws InputError if A is not symmetric within 1e-12 ||A||.
EigSolution sym_eig_top(const Eigen::MatrixXd& a, int count, double tol = 1e-10);

struct GenEigOptions {
  double tol = 1e-10;
  bool prune = false;           // drop overlap eigenvalues below prune_cutoff * max
  double prune_cutoff = 1e-12;
  double max_condition = 1e14;  // unpruned reduction refuses anything worse
};

/// Reduction of H v = lambda S v to a standard problem. The overlap is first
/// equilibrated to unit diagonal; without pruning a Cholesky factor is used,
/// with pruning a canonical orthogonalization on the retained subspace.
/// The reduction depends on S only, so it can be reused for many H.
class OverlapReduction {
 public:
  OverlapReduction(const Eigen::MatrixXd& s, GenEigOptions options = {});

  /// Lowest `count` generalized eigenpairs, S-orthonormal eigenvectors.
  EigSolution lowest(const Eigen::MatrixXd& h, int count = 1) const;

  double condition() const noexcept { return condition_; }
  Eigen::Index kept() const noexcept { return transform_.cols(); }
  const Eigen::MatrixXd& transform() const noexcept { return transform_; }

 private:
  Eigen::MatrixXd overlap_;
  Eigen::MatrixXd transform_;  // X with X^T S X = I
  GenEigOptions options_;
  double condition_ = 1.0;
};

/// Smallest eigenpair of H v = lambda S v. Throws ConditioningError when S is
/// numerically singular and pruning is disabled.
EigSolution gen_sym_eig_min(const Eigen::MatrixXd& h, const Eigen::MatrixXd& s,
                            GenEigOptions options = {});

// ---------------------------------------------------------------- root finding

/// Root of f inside [lo, hi]; requires f(lo) f(hi) < 0 (BracketError otherwise).
/// Terminates when the bracket is narrower than tol or f vanishes exactly.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-10, int max_iterations = 200);

// ----------------------------------------------------------- radial shooting

/// Attractive radial well W(r) >= 0 for  u'' = -(W(r) + E) u, plus the radii
/// where W jumps (integration restarts there so the order is not lost).
struct RadialWell {
  std::function<double(double)> depth;
  std::vector<double> breakpoints;
};

struct RadialSolution {
  double log_derivative = 0.0;  // u'(r_max) / u(r_max)
  int nodes = 0;                // sign changes of u on (0, r_max]
  double u = 0.0;               // (u, u') at r_max, scaled so u^2 + u'^2 = 1
  double du = 0.0;
  double error_estimate = 0.0;  // step-doubling estimate of the phase error
};

/// Fourth-order outward integration of u'' = -(W(r) + E) u from u(0) = 0.
/// Throws AccuracyError when the step-doubling estimate exceeds tol.
RadialSolution radial_integrate(const RadialWell& well, double energy, double r_max,
                                int steps, double tol = 1e-9);

}  // namespace zerores
