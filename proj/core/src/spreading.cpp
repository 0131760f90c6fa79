#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/LU>

#include "zerores/errors.hpp"
#include "zerores/threebody.hpp"

namespace zerores {

namespace {

constexpr double kPi = std::numbers::pi;

// Eigenvalues of a symmetric positive-definite 2x2 form.
std::pair<double, double> form_eigenvalues(const Eigen::Matrix2d& b) {
  const double mean = 0.5 * (b(0, 0) + b(1, 1));
  const double half = 0.5 * (b(0, 0) - b(1, 1));
  const double radius = std::hypot(half, b(0, 1));
  const double hi = mean + radius;
  const double lo = b.determinant() / hi;
  return {lo, hi};
}

// Regularized lower incomplete gamma P(3, x).
double gamma_p3(double x) {
  if (x < 1.0) {
    double term = x * x * x / 6.0;
    double sum = term;
    for (int k = 4; term > 1e-17 * sum; ++k) {
      term *= x / k;
      sum += term;
    }
    return std::exp(-x) * sum;
  }
  return 1.0 - std::exp(-x) * (1.0 + x + 0.5 * x * x);
}

// Integral of exp(-1/2 xi^T (B (x) I3) xi) over the ball |xi| < R in R^6, B with
// eigenvalues b1 <= b2. In B's eigenframe put |u| = rho cos(t), |v| = rho sin(t);
// the radial integral is (8 / g^3) P(3, g R^2 / 2) with g = b1 cos^2 t + b2 sin^2 t.
// The substitution tan(t) = k tan(phi), k = sqrt(b1 / b2), turns the angular
// integral into (8 / (b1 b2)^{3/2}) int_0^{pi/2} sin^2 cos^2 P(3, x0 / (cos^2 + k^2 sin^2)) dphi
// with x0 = b1 R^2 / 2; the remaining structure sits within ~k of pi/2.
double ball_integral(double b1, double b2, double radius, double tol) {
  const double k2 = b1 / b2;
  const double k = std::sqrt(k2);
  const double x0 = 0.5 * b1 * radius * radius;
  const auto f = [&](double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return s * s * c * c * gamma_p3(x0 / (c * c + k2 * s * s));
  };
  const double half_pi = 0.5 * kPi;
  std::vector<double> edges{0.0};
  std::vector<double> near;
  for (double d = 0.25 * k; d < half_pi; d *= 4.0) near.push_back(half_pi - d);
  for (auto it = near.rbegin(); it != near.rend(); ++it) edges.push_back(*it);
  edges.push_back(half_pi);
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double err = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, edges[i],
                                                                           edges[i + 1], 12, tol,
                                                                           &err);
    error += err;
  }
  // The whole-space value of the angular integral is pi / 16.
  if (!(error <= 1e2 * tol * kPi / 16.0)) throw AccuracyError("ball integral did not converge");
  return 16.0 * kPi * kPi * 8.0 / std::pow(b1 * b2, 1.5) * value;
}

}  // namespace

Spreading spreading_profile(const VariationalResult& state, const GaussianBasis& basis,
                            std::span<const double> radii, double tol) {
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("spreading radius must be positive");
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (state.coefficients.size() != n) throw InputError("state and basis sizes differ");
  const Eigen::VectorXd& c = state.coefficients;
  const double norm_const = std::pow(2.0 * kPi, 3);

  Spreading out;
  out.inside.assign(radii.size(), 0.0);
  double moment = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m; k < n; ++k) {
      const double weight = (m == k ? 1.0 : 2.0) * c(m) * c(k);
      if (weight == 0.0) continue;
      const Eigen::Matrix2d b = basis.forms[m] + basis.forms[k];
      const double det = b.determinant();
      const double s = norm_const / std::pow(det, 1.5);
      out.norm += weight * s;
      moment += weight * 3.0 * (b(0, 0) + b(1, 1)) / det * s;
      const auto [b1, b2] = form_eigenvalues(b);
      for (std::size_t r = 0; r < radii.size(); ++r) {
        out.inside[r] += weight * ball_integral(b1, b2, radii[r], tol);
      }
    }
  }
  if (!(out.norm > 0.0)) throw InputError("state has non-positive norm");
  for (double& v : out.inside) v /= out.norm;
  out.xi2 = moment / out.norm;
  return out;
}

double spreading_metric(const VariationalResult& state, const GaussianBasis& basis, double radius,
                        double tol) {
  const double radii[] = {radius};
  return spreading_profile(state, basis, radii, tol).inside[0];
}

double second_moment(const VariationalResult& state, const GaussianBasis& basis) {
  return spreading_profile(state, basis, {}, 1e-10).xi2;
}

}  // namespace zerores
