#include "zerores/threebody.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "zerores/errors.hpp"
#include "zerores/parallel.hpp"
#include "zerores/twobody.hpp"

namespace zerores {

namespace {

constexpr double kPi = std::numbers::pi;

// E[exp(-r/R)] for |r| of a 3D normal law with variance s2 per axis, a = sigma/R.
double exponential_average(double a) {
  if (a < 12.0) {
    const double x = a / std::numbers::sqrt2;
    const double erfcx = std::exp(x * x) * boost::math::erfc(x);
    return (1.0 + a * a) * erfcx - a * std::sqrt(2.0 / kPi);
  }
  // sqrt(2/pi) sum_n (-1/2)^n (2n+2)! / (n! a^{2n+3}), asymptotic in 1/a^2
  double term = 2.0 / (a * a * a);
  double sum = term;
  for (int n = 1; n < 60; ++n) {
    const double next = term * -0.5 * (2.0 * n + 1.0) * (2.0 * n + 2.0) / (n * a * a);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(2.0 / kPi) * sum;
}

}  // namespace

double gaussian_average(const PairPotential& potential, double sigma2) {
  if (!(sigma2 > 0.0)) throw InputError("pair variance must be positive");
  const double r = potential.range();
  const double strength = potential.strength();
  switch (potential.shape()) {
    case Shape::gaussian:
      return strength * std::pow(1.0 + 2.0 * sigma2 / (r * r), -1.5);
    case Shape::square_well: {
      const double sigma = std::sqrt(sigma2);
      const double u = r / sigma;
      return strength * (std::erf(u / std::numbers::sqrt2) -
                         std::sqrt(2.0 / kPi) * u * std::exp(-0.5 * u * u));
    }
    case Shape::exponential:
      return strength * exponential_average(std::sqrt(sigma2) / r);
  }
  return 0.0;
}

ElementMatrices element_matrices(const GaussianBasis& basis, const MassConfig& masses,
                                 const PairPotentials& potentials, int threads) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const JacobiFrame frame = pair_coefficients(masses);
  std::array<Eigen::Vector2d, 3> c;
  for (Pair p : kAllPairs) c[static_cast<int>(p)] = frame.separation(p);

  ElementMatrices out;
  out.overlap.resize(n, n);
  out.kinetic.resize(n, n);
  for (auto& v : out.potential) v.resize(n, n);
  const double norm = std::pow(2.0 * kPi, 3);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    const auto m = static_cast<Eigen::Index>(row);
    const Eigen::Matrix2d& am = basis.forms[row];
    for (Eigen::Index k = m; k < n; ++k) {
      const Eigen::Matrix2d& an = basis.forms[k];
      const Eigen::Matrix2d sum = am + an;
      const double det = sum.determinant();
      if (!(det > 0.0) || !(sum(0, 0) > 0.0)) {
        throw InputError("sum of basis forms is not positive definite");
      }
      const Eigen::Matrix2d inv = sum.inverse();
      const double s = norm / std::pow(det, 1.5);
      const double t = 3.0 * (am * inv * an).trace() * s;
      out.overlap(m, k) = out.overlap(k, m) = s;
      out.kinetic(m, k) = out.kinetic(k, m) = t;
      for (Pair p : kAllPairs) {
        const int i = static_cast<int>(p);
        const double sigma2 = c[i].dot(inv * c[i]);
        const double v = s * gaussian_average(potentials[p], sigma2);
        out.potential[i](m, k) = out.potential[i](k, m) = v;
      }
    }
  });
  return out;
}

HamiltonianMatrices hamiltonian_elements(const GaussianBasis& basis, const MassConfig& masses,
                                         const PairPotentials& potentials, double theta,
                                         double lambda) {
  const ElementMatrices e = element_matrices(basis, masses, potentials);
  HamiltonianMatrices out;
  out.s = e.overlap;
  out.h = e.kinetic - e.potential[0] - theta * e.potential[1] - lambda * e.potential[2];
  return out;
}

VariationalResult ground_state(const HamiltonianMatrices& hs, GenEigOptions options) {
  const OverlapReduction reduction(hs.s, options);
  const EigSolution sol = reduction.lowest(hs.h, 1);
  VariationalResult out;
  out.energy = sol.values(0);
  out.coefficients = sol.vectors.col(0);
  if (out.coefficients.sum() < 0.0) out.coefficients = -out.coefficients;
  out.condition = sol.condition;
  out.kept = static_cast<int>(sol.kept);
  out.residual = sol.residuals(0);
  if (!out.coefficients.allFinite()) throw ConvergenceError("ground-state coefficients not finite");
  return out;
}

VariationalProblem::VariationalProblem(GaussianBasis basis, const MassConfig& masses,
                                       const PairPotentials& potentials, double v12,
                                       GenEigOptions options, int threads)
    : basis_(std::move(basis)),
      elements_(element_matrices(basis_, masses, potentials, threads)),
      v12_(v12),
      reduction_(elements_.overlap, options) {}

Eigen::MatrixXd VariationalProblem::hamiltonian(double theta, double lambda) const {
  return elements_.kinetic - v12_ * elements_.potential[0] - theta * elements_.potential[1] -
         lambda * elements_.potential[2];
}

VariationalResult VariationalProblem::solve(double theta, double lambda) const {
  const EigSolution sol = reduction_.lowest(hamiltonian(theta, lambda), 1);
  VariationalResult out;
  out.energy = sol.values(0);
  out.coefficients = sol.vectors.col(0);
  if (out.coefficients.sum() < 0.0) out.coefficients = -out.coefficients;
  out.condition = sol.condition;
  out.kept = static_cast<int>(sol.kept);
  out.residual = sol.residuals(0);
  if (!out.coefficients.allFinite()) throw ConvergenceError("ground-state coefficients not finite");
  return out;
}

double VariationalProblem::energy(double theta, double lambda) const {
  const Eigen::MatrixXd& x = reduction_.transform();
  Eigen::MatrixXd reduced = x.transpose() * hamiltonian(theta, lambda) * x;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("reduced eigensolver failed");
  return solver.eigenvalues()(0);
}

Subthresholds two_body_subthresholds(const MassConfig& masses, const PairPotentials& potentials,
                                     int nodes) {
  std::array<double, 3> crit{};
  for (Pair p : kAllPairs) {
    const PairPotential scaled = jacobi_scaled(potentials[p], masses, p);
    if (scaled.strength() <= 0.0) {
      throw DomainError("pair " + std::string(to_string(p)) + " potential vanishes");
    }
    const QuadratureRule grid = radial_grid(scaled, nodes);
    // Threshold multiplier relative to the configured coupling.
    crit[static_cast<int>(p)] = coupling_threshold(scaled, grid).lambda_cr;
  }
  return {crit[0], crit[1], crit[2]};
}

namespace {

Boundary bisect_boundary(const std::function<double(double)>& energy, double lo, double hi,
                         double tol_bind, double width) {
  const auto bound = [&](double t) { return energy(t) < -tol_bind; };
  if (bound(lo) || !bound(hi)) {
    std::ostringstream msg;
    msg << "binding boundary not bracketed by [" << lo << ", " << hi << "]";
    throw BracketError(msg.str());
  }
  Boundary b{lo, hi};
  while (b.above - b.below > width * std::max(1.0, b.above)) {
    const double mid = 0.5 * (b.below + b.above);
    (bound(mid) ? b.above : b.below) = mid;
  }
  return b;
}

}  // namespace

std::optional<Boundary> empirical_epsilon(const VariationalProblem& problem, double t_max,
                                          double tol_bind, double width) {
  const auto diag = [&](double t) { return problem.energy(t, t); };
  if (diag(t_max) >= -tol_bind) return std::nullopt;
  return bisect_boundary(diag, 0.0, t_max, tol_bind, width);
}

Boundary find_theta0(const VariationalProblem& problem, double lambda, double lo, double hi,
                     double tol_bind, double width) {
  return bisect_boundary([&](double t) { return problem.energy(t, lambda); }, lo, hi, tol_bind,
                         width);
}

std::vector<ScanRecord> theta_scan(const VariationalProblem& problem,
                                   std::span<const double> thetas, double lambda,
                                   const ScanOptions& options) {
  for (double r : options.radii) {
    if (!(r > 0.0)) throw DomainError("spreading radius must be positive");
  }
  std::vector<ScanRecord> records(thetas.size());
  parallel_for(thetas.size(), options.threads, [&](std::size_t i) {
    const VariationalResult vr = problem.solve(thetas[i], lambda);
    const Spreading sp =
        spreading_profile(vr, problem.basis(), options.radii, options.spreading_tol);
    records[i] = {thetas[i], lambda,  vr.energy, sp.inside, sp.xi2,
                  vr.kept,   vr.condition};
  });

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return records[l].theta < records[r].theta; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const ScanRecord& prev = records[order[i - 1]];
    const ScanRecord& cur = records[order[i]];
    if (cur.energy > prev.energy + options.monotone_tol * std::max(1.0, std::abs(prev.energy))) {
      std::ostringstream msg;
      msg << "E_gr rises from " << prev.energy << " at Theta = " << prev.theta << " to "
          << cur.energy << " at Theta = " << cur.theta << "; enlarge the basis";
      throw ConvergenceError(msg.str());
    }
  }
  return records;
}

}  // namespace zerores
