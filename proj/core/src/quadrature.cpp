#include <cmath>
#include <numbers>

#include "zerores/errors.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

namespace {

// Newton iteration on P_n from the Tricomi-style initial guess; the rule on
// [-1, 1] is symmetric so only half the roots are computed.
void legendre_reference(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  if (!(a < b)) throw DomainError("Gauss-Legendre interval requires a < b");
  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  if (n == 1) {
    rule.nodes = {0.5 * (a + b)};
    rule.weights = {b - a};
    return rule;
  }
  std::vector<double> x, w;
  legendre_reference(n, x, w);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * x[i];
    rule.weights[i] = half * w[i];
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breaks,
                                        std::span<const int> per_panel) {
  if (breaks.size() < 2 || per_panel.size() != breaks.size() - 1) {
    throw DomainError("composite rule needs one node count per panel");
  }
  QuadratureRule rule;
  rule.a = breaks.front();
  rule.b = breaks.back();
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const QuadratureRule panel = gauss_legendre(per_panel[p], breaks[p], breaks[p + 1]);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

}  // namespace zerores
