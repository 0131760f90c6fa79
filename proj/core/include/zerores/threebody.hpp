#pragma once

// Correlated-Gaussian variational solver for
//   H(Theta, Lambda) = [-Lap_x - V12] - Lap_y - Theta V13 - Lambda V23
// in the Jacobi frame of pair 12. Trial functions are exp(-1/2 xi^T (A (x) I3) xi)
// with xi = (x, y) and A a symmetric positive-definite 2x2 form.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "zerores/model.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

struct WidthLadder {
  double lo = 0.4;
  double hi = 40.0;
  int count = 7;

  /// Geometric sequence from lo to hi (just lo when count is 1).
  std::vector<double> values() const;
};

/// Widths b1 (pair coordinate) and b2 (spectator coordinate) of the diagonal
/// forms diag(1/b1^2, 1/b2^2) written in each listed arrangement's own Jacobi
/// frame and then rotated into the pair-12 frame.
struct BasisRecipe {
  WidthLadder pair{0.4, 40.0, 7};
  WidthLadder spectator{0.4, 400.0, 9};
  std::vector<Pair> arrangements{Pair::p12, Pair::p13, Pair::p23};
  /// Keep only every stride-th rung of both ladders (nested sub-bases).
  int stride = 1;

  static BasisRecipe standard();
  /// Finer ladders, about twice the size of standard().
  static BasisRecipe doubled();
};

struct GaussianBasis {
  std::vector<Eigen::Matrix2d> forms;
  int duplicates_removed = 0;

  std::size_t size() const { return forms.size(); }
};

/// Throws InputError if a form is not symmetric positive definite.
GaussianBasis make_basis(std::vector<Eigen::Matrix2d> forms);
GaussianBasis make_basis(const MassConfig& masses, const BasisRecipe& recipe);

/// Closed-form integrals of products of two trial functions.
struct ElementMatrices {
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd kinetic;                   // <m| -Lap_x - Lap_y |n>
  std::array<Eigen::MatrixXd, 3> potential;  // <m| V_pair |n>, indexed by Pair
};

ElementMatrices element_matrices(const GaussianBasis& basis, const MassConfig& masses,
                                 const PairPotentials& potentials, int threads = 1);

/// <exp(-1/2 xi^T (C (x) I3) xi) V(|c . xi|)> divided by the overlap, for
/// sigma^2 = c^T C^{-1} c, i.e. the mean of V over a 3D normal law of variance sigma^2.
double gaussian_average(const PairPotential& potential, double sigma2);

struct HamiltonianMatrices {
  Eigen::MatrixXd h;
  Eigen::MatrixXd s;
};

/// H = T - V12 - Theta V13 - Lambda V23 with V12 taken at its given coupling.
HamiltonianMatrices hamiltonian_elements(const GaussianBasis& basis, const MassConfig& masses,
                                         const PairPotentials& potentials, double theta,
                                         double lambda);

struct VariationalResult {
  double energy = 0.0;
  Eigen::VectorXd coefficients;  // c^T S c = 1
  double condition = 0.0;        // of the equilibrated overlap
  int kept = 0;                  // basis size after pruning
  double residual = 0.0;
};

VariationalResult ground_state(const HamiltonianMatrices& hs, GenEigOptions options = {});

/// Element matrices and overlap factorization for one basis, reused across couplings.
class VariationalProblem {
 public:
  /// v12 is the coupling multiplier applied to potentials[p12] (normally lambda_cr).
  VariationalProblem(GaussianBasis basis, const MassConfig& masses,
                     const PairPotentials& potentials, double v12, GenEigOptions options = {},
                     int threads = 1);

  Eigen::MatrixXd hamiltonian(double theta, double lambda) const;
  VariationalResult solve(double theta, double lambda) const;
  double energy(double theta, double lambda) const;

  const GaussianBasis& basis() const { return basis_; }
  const ElementMatrices& elements() const { return elements_; }
  double condition() const { return reduction_.condition(); }
  int kept() const { return reduction_.kept(); }
  double v12() const { return v12_; }

 private:
  GaussianBasis basis_;
  ElementMatrices elements_;
  double v12_;
  OverlapReduction reduction_;
};

struct Subthresholds {
  double lambda12 = 0.0;   // critical multiplier of V12 in -Lap_x - V12
  double theta_cr = 0.0;   // of V13
  double lambda_cr = 0.0;  // of V23
};

/// Two-body thresholds of each pair in its own Jacobi coordinate.
Subthresholds two_body_subthresholds(const MassConfig& masses, const PairPotentials& potentials,
                                     int nodes = 400);

struct Boundary {
  double below = 0.0;  // last coupling with E_gr >= -tol_bind
  double above = 0.0;  // first coupling with E_gr < -tol_bind
  double value() const { return 0.5 * (below + above); }
};

/// Edge of the unbound box along the diagonal Theta = Lambda = t in [0, t_max].
/// Returns nullopt if E_gr(t_max, t_max) >= -tol_bind.
std::optional<Boundary> empirical_epsilon(const VariationalProblem& problem, double t_max,
                                          double tol_bind = 1e-6, double width = 1e-9);

/// Theta_0 with E_gr(Theta_0, Lambda) = -tol_bind, bisected inside [lo, hi].
/// Throws BracketError unless E_gr(lo) >= -tol_bind > E_gr(hi).
Boundary find_theta0(const VariationalProblem& problem, double lambda, double lo, double hi,
                     double tol_bind = 1e-6, double width = 1e-9);

struct ScanRecord {
  double theta = 0.0;
  double lambda = 0.0;
  double energy = 0.0;
  std::vector<double> inside;  // I_R for each requested R
  double xi2 = 0.0;            // <|xi|^2>
  int basis_n = 0;
  double cond_s = 0.0;
};

struct ScanOptions {
  std::vector<double> radii{5.0};
  double monotone_tol = 1e-10;
  int threads = 1;
  double spreading_tol = 1e-10;
};

/// Ground state at each Theta. Throws ConvergenceError if E_gr increases with Theta.
std::vector<ScanRecord> theta_scan(const VariationalProblem& problem,
                                   std::span<const double> thetas, double lambda,
                                   const ScanOptions& options = {});

/// int_{|xi| < R} |psi|^2 d^6 xi for the normalized state.
double spreading_metric(const VariationalResult& state, const GaussianBasis& basis, double radius,
                        double tol = 1e-10);

struct Spreading {
  std::vector<double> inside;
  double xi2 = 0.0;
  double norm = 0.0;  // c^T S c as recomputed here
};

Spreading spreading_profile(const VariationalResult& state, const GaussianBasis& basis,
                            std::span<const double> radii, double tol = 1e-10);

/// <|xi|^2> = sum c_m c_n 3 tr(B^{-1}) S_mn / sum c_m c_n S_mn.
double second_moment(const VariationalResult& state, const GaussianBasis& basis);

}  // namespace zerores
