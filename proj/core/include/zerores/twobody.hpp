#pragma once

// Two-body Birman-Schwinger machinery in the s-wave sector.
//
// The operator sqrt(V) (-d^2/dr^2 + k^2)^{-1} sqrt(V) acts on radial functions
// u(r) = sqrt(4 pi) r phi(r) with the Dirichlet Green's function
//   G_k(r, r') = (exp(-k|r - r'|) - exp(-k(r + r'))) / (2k),  G_0 = min(r, r').
// It is discretized by Nystrom on a Gauss-Legendre grid in the symmetric
// weights-embedded form  M_ij = sqrt(w_i V_i) G_k(r_i, r_j) sqrt(w_j V_j).
// Discretized vectors are weights-embedded too: v_i = sqrt(w_i) phi(r_i).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zerores/model.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

/// How the kink of G_k on the diagonal is treated.
///  plain:      bare Nystrom matrix, O(N^-2) eigenvalue error.
///  subtracted: singularity subtraction; adds the diagonal correction
///              V_i (int G_k(r_i, r') dr' - sum_j w_j G_k(r_i, r_j)), O(N^-4).
enum class KernelRule { plain, subtracted };

double s_wave_green(double k, double r, double r_prime);

/// Exact integral of G_k(r, r') over r' in [0, r_max].
double s_wave_green_row_integral(double k, double r, double r_max);

/// Gauss-Legendre grid on [0, r_max] split at the potential's breakpoints.
/// r_max <= 0 selects the default 20 / b2.
QuadratureRule radial_grid(const PairPotential& potential, int nodes, double r_max = 0.0);

struct BSMatrix {
  double k = 0.0;
  QuadratureRule grid;
  Eigen::MatrixXd entries;
  PairPotential potential;
  KernelRule rule = KernelRule::subtracted;
  std::vector<std::string> warnings;
};

/// Throws DomainError for k < 0. Adds a warning when r_max < 20 / b2.
BSMatrix build_bs_matrix(const PairPotential& potential, double k, const QuadratureRule& grid,
                         KernelRule rule = KernelRule::subtracted);

struct ThresholdOptions {
  double eig_tol = 1e-10;
  bool cross_check = true;      // confirm with the zero-energy shooting oracle
  double tolerance = 1e-6;      // relative; disagreement > 10x raises ConsistencyError
  int shooting_steps = 20000;
};

struct ThresholdResult {
  double lambda_cr = 0.0;        // 1 / mu_max(L(0))
  double mu_max = 0.0;           // top eigenvalue of L(0) at the given coupling
  double gap = 0.0;              // mu_1 - mu_2 of L(0)
  double lambda_shooting = 0.0;  // zero-energy log-derivative sign change (0 if skipped)
};

/// Critical coupling multiplier of the potential (relative to its current coupling).
ThresholdResult coupling_threshold(const PairPotential& potential, const QuadratureRule& grid,
                                   ThresholdOptions options = {});

struct ResonanceOptions {
  double gap_min = 0.05;
  double degeneracy_tol = 1e-8;
  double k_start = 1e-3;
  double k_cap = 1e3;
};

struct ResonanceData {
  double lambda_cr = 0.0;  // coupling of the potential the data was computed for
  QuadratureRule grid;
  Eigen::VectorXd u0;      // dominant eigenvector of L(0), >= 0, unit norm
  double mu0 = 0.0;        // its eigenvalue (1 at threshold)
  double gap = 0.0;
  double a = 0.0;
  double rho0_est = 0.0;   // largest k keeping mu_1 - mu_2 >= gap_min
};

/// Dominant eigenpair of L(0) for a potential tuned to its threshold.
ResonanceData resonance_function(const PairPotential& at_threshold, const QuadratureRule& grid,
                                 ResonanceOptions options = {});

/// a = (int_0^inf r sqrt(V) u0 dr)^2, the radial form of (phi0, V^{1/2})^2 / (4 pi).
double a_coefficient(const ResonanceData& rd, const PairPotential& potential);

/// Top two eigenvalues of L(k) (values only).
std::pair<double, double> top_two_eigenvalues(const PairPotential& potential, double k,
                                              const QuadratureRule& grid);

struct MuSample {
  double k = 0.0;
  double mu = 0.0;
  double gap = 0.0;
};

struct FitWindow {
  double lo = 1e-3;
  double hi = 1e-2;
};

struct MuCurve {
  std::vector<MuSample> samples;
  FitWindow window;
  int fit_count = 0;
  double slope = 0.0;      // least-squares line over the window
  double intercept = 0.0;
  double residual = 0.0;   // rms deviation from the line
  double slope_at_zero = 0.0;  // linear coefficient of a quadratic fit over the window
};

struct MuCurveOptions {
  FitWindow window;
  double rho0 = 0.0;  // samples must lie in (0, rho0); <= 0 disables the check
  int threads = 1;
};

MuCurve mu_curve(const PairPotential& at_threshold, std::span<const double> k_samples,
                 const QuadratureRule& grid, MuCurveOptions options = {});

struct WSample {
  double k = 0.0;
  double mu = 0.0;
  double gap = 0.0;
  double norm_w = 0.0;
  double norm_z = 0.0;
};

struct WDecomposition {
  std::vector<WSample> samples;
};

/// W(k) = (1 - L(k))^{-1} by dense solve and Z(k) = W(k) - P0 / (a k), with
/// P0 = u0 u0^T from the resonance data. Norms are spectral norms.
WDecomposition w_decomposition(const ResonanceData& rd, const PairPotential& at_threshold,
                               std::span<const double> k_samples, int threads = 1);

struct BindingOptions {
  bool cross_check = true;
  double tolerance = 1e-6;  // relative agreement demanded from the shooting oracle
  int shooting_steps = 40000;
};

struct BindingResult {
  double kappa = 0.0;           // mu_max(L(kappa)) = 1
  double energy = 0.0;          // -kappa^2
  double kappa_shooting = 0.0;  // outward shooting (0 if skipped)
};

/// Bound state of -d^2/dr^2 - V below threshold; nullopt when V is at or
/// below its coupling threshold (no bound state, not an error).
std::optional<BindingResult> binding_energy(const PairPotential& potential,
                                            const QuadratureRule& grid,
                                            BindingOptions options = {});

// Shooting oracles, independent of the Birman-Schwinger route.

RadialWell radial_well(const PairPotential& potential);

/// Coupling multiplier at which the zero-energy outward solution has zero
/// slope at r_max, searched inside [lo, hi].
double shooting_threshold(const PairPotential& potential, double lo, double hi, double r_max,
                          int steps = 20000);

/// Decay constant kappa of the bound state nearest to kappa_guess, from the
/// matching condition u'/u = -kappa, imposed where V has dropped below 1e-13 kappa^2
/// (at most r_max).
double shooting_kappa(const PairPotential& potential, double kappa_guess, double r_max,
                      int steps = 40000);

}  // namespace zerores
