#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zerores/errors.hpp"
#include "zerores/twobody.hpp"

using namespace zerores;

namespace {

const PairPotential kWell(Shape::square_well, 1.0, 1.0);
const PairPotential kExp(Shape::exponential, 1.0, 1.0);
const PairPotential kGauss(Shape::gaussian, 1.0, 1.0);

struct AtThreshold {
  PairPotential potential;
  QuadratureRule grid;
  ResonanceData rd;
};

AtThreshold at_threshold(const PairPotential& p, int nodes = 400) {
  const QuadratureRule grid = radial_grid(p, nodes);
  const double lc = coupling_threshold(p, grid).lambda_cr;
  const PairPotential at = p.with_coupling(lc);
  return {at, grid, resonance_function(at, grid)};
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}

}  // namespace

TEST(Green, StableNearZero) {
  EXPECT_DOUBLE_EQ(s_wave_green(0.0, 0.3, 0.7), 0.3);
  // (e^{-k|r-r'|} - e^{-k(r+r')}) / 2k -> min(r, r') as k -> 0
  EXPECT_NEAR(s_wave_green(1e-12, 0.3, 0.7), 0.3, 1e-12);
  const double k = 0.8, r = 1.1, rp = 2.5;
  EXPECT_NEAR(s_wave_green(k, r, rp),
              (std::exp(-k * (rp - r)) - std::exp(-k * (r + rp))) / (2 * k), 1e-15);
  EXPECT_DOUBLE_EQ(s_wave_green(k, r, rp), s_wave_green(k, rp, r));
}

TEST(Green, RowIntegral) {
  for (double k : {0.0, 1e-6, 0.3, 4.0}) {
    const double r = 0.7, rmax = 6.0;
    const double want = oracle::integrate(
        [&](double rp) { return s_wave_green(k, r, rp); }, 0.0, r) +
                        oracle::integrate(
        [&](double rp) { return s_wave_green(k, r, rp); }, r, rmax);
    EXPECT_NEAR(s_wave_green_row_integral(k, r, rmax), want, 1e-12 * want) << k;
  }
}

TEST(BuildBSMatrix, PlainRuleZeroMomentum) {
  const QuadratureRule g = radial_grid(kGauss, 60);
  const BSMatrix m = build_bs_matrix(kGauss, 0.0, g, KernelRule::plain);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double want = std::sqrt(g.weights[i] * g.weights[j] * kGauss(g.nodes[i]) *
                                    kGauss(g.nodes[j])) *
                          std::min(g.nodes[i], g.nodes[j]);
      EXPECT_NEAR(m.entries(i, j), want, 1e-15 * std::max(1.0, want));
    }
  }
  // the subtracted rule changes only the diagonal
  const BSMatrix s = build_bs_matrix(kGauss, 0.0, g);
  const Eigen::MatrixXd off = s.entries - m.entries;
  EXPECT_LT((off - Eigen::MatrixXd(off.diagonal().asDiagonal())).norm(), 1e-15);
}

TEST(BuildBSMatrix, MonotoneInMomentum) {
  const QuadratureRule g = radial_grid(kExp, 80);
  const BSMatrix m0 = build_bs_matrix(kExp, 0.0, g, KernelRule::plain);
  const BSMatrix m1 = build_bs_matrix(kExp, 1.0, g, KernelRule::plain);
  for (Eigen::Index i = 0; i < m0.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < m0.entries.cols(); ++j) {
      EXPECT_LT(m1.entries(i, j), m0.entries(i, j));
      EXPECT_GE(m1.entries(i, j), 0.0);
    }
  }
}

TEST(BuildBSMatrix, LinearInCoupling) {
  const QuadratureRule g = radial_grid(kWell, 100);
  for (double k : {0.0, 0.5}) {
    const BSMatrix a = build_bs_matrix(kWell, k, g);
    const BSMatrix b = build_bs_matrix(kWell.with_coupling(2.0), k, g);
    EXPECT_LT((b.entries - 2.0 * a.entries).norm(), 1e-14 * a.entries.norm());
    EXPECT_LT((a.entries - a.entries.transpose()).norm(), 1e-15 * a.entries.norm());
  }
}

TEST(BuildBSMatrix, Errors) {
  const QuadratureRule g = radial_grid(kWell, 50);
  EXPECT_THROW(build_bs_matrix(kWell, -1.0, g), DomainError);
  const QuadratureRule shortgrid = gauss_legendre(50, 0.0, 3.0);
  EXPECT_FALSE(build_bs_matrix(kExp, 0.0, shortgrid).warnings.empty());
  EXPECT_TRUE(build_bs_matrix(kExp, 0.0, radial_grid(kExp, 50)).warnings.empty());
}

TEST(CouplingThreshold, SquareWell) {
  const ThresholdResult t = coupling_threshold(kWell, radial_grid(kWell, 400));
  EXPECT_NEAR(t.lambda_cr / oracle::square_well_threshold(1, 1), 1.0, 1e-4);
  EXPECT_NEAR(t.lambda_shooting / t.lambda_cr, 1.0, 1e-5);
}

TEST(CouplingThreshold, ExponentialBessel) {
  const ThresholdResult t = coupling_threshold(kExp, radial_grid(kExp, 400));
  EXPECT_NEAR(t.lambda_cr / oracle::exponential_threshold(1, 1), 1.0, 1e-4);
  const PairPotential wide(Shape::exponential, 0.7, 2.0);
  EXPECT_NEAR(coupling_threshold(wide, radial_grid(wide, 400)).lambda_cr /
                  oracle::exponential_threshold(0.7, 2.0),
              1.0, 1e-4);
}

TEST(CouplingThreshold, DepthScaling) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const QuadratureRule g = radial_grid(p, 200);
    const double one = coupling_threshold(p, g).lambda_cr;
    const PairPotential deep(p.shape(), 2.0 * p.depth(), p.range());
    const double two = coupling_threshold(deep, g).lambda_cr;
    EXPECT_NEAR(two / one, 0.5, 1e-10);
  }
}

TEST(CouplingThreshold, ZeroPotential) {
  const PairPotential none(Shape::gaussian, 0.0, 1.0);
  EXPECT_THROW(coupling_threshold(none, gauss_legendre(50, 0, 20)), DomainError);
}

TEST(ResonanceFunction, NormalizedNonnegative) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const AtThreshold t = at_threshold(p);
    EXPECT_NEAR(t.rd.u0.norm(), 1.0, 1e-10);
    EXPECT_GE(t.rd.u0.minCoeff(), -1e-10);
    EXPECT_NEAR(t.rd.mu0, 1.0, 1e-8);
    EXPECT_GT(t.rd.a, 0.0);
    EXPECT_GT(t.rd.gap, 0.05);
  }
}

TEST(ResonanceFunction, SquareWellShape) {
  const AtThreshold t = at_threshold(kWell);
  const QuadratureRule& g = t.grid;
  Eigen::VectorXd analytic(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.nodes[i];
    analytic(i) = r < 1.0 ? std::sqrt(g.weights[i]) * std::sin(oracle::pi * r / 2) : 0.0;
  }
  const double cosine = t.rd.u0.dot(analytic) / analytic.norm();
  EXPECT_LE(1.0 - cosine, 1e-6);
}

TEST(ACoefficient, SquareWell) {
  const AtThreshold t = at_threshold(kWell);
  EXPECT_NEAR(t.rd.a / oracle::square_well_a(), 1.0, 1e-4);
  EXPECT_NEAR(a_coefficient(t.rd, t.potential), t.rd.a, 1e-14);
}

TEST(MuCurve, SquareWellExpansion) {
  const AtThreshold t = at_threshold(kWell);
  MuCurveOptions o;
  o.rho0 = t.rd.rho0_est;
  const MuCurve c = mu_curve(t.potential, logspace(1e-3, 1e-2, 11), t.grid, o);
  EXPECT_EQ(c.fit_count, 11);
  EXPECT_NEAR(c.intercept, 1.0, 1e-4);
  EXPECT_NEAR(-c.slope / t.rd.a, 1.0, 1e-2);
  for (std::size_t i = 1; i < c.samples.size(); ++i) {
    EXPECT_LT(c.samples[i].mu, c.samples[i - 1].mu);
  }
}

TEST(MuCurve, SampleBeyondRho0) {
  const AtThreshold t = at_threshold(kWell);
  MuCurveOptions o;
  o.rho0 = t.rd.rho0_est;
  const std::vector<double> k{1e-2, 2.0 * t.rd.rho0_est};
  EXPECT_THROW(mu_curve(t.potential, k, t.grid, o), RangeError);
}

TEST(WDecomposition, PoleAndBoundedRemainder) {
  const AtThreshold t = at_threshold(kWell);
  const std::vector<double> k{1e-1, 1e-2, 1e-3, 1e-4};
  const WDecomposition w = w_decomposition(t.rd, t.potential, k);
  ASSERT_EQ(w.samples.size(), 4u);
  EXPECT_GE(w.samples[2].norm_w * t.rd.a * 1e-3, 0.9);
  EXPECT_LE(w.samples[2].norm_w * t.rd.a * 1e-3, 1.1);
  double zmax = 0.0;
  for (const WSample& s : w.samples) zmax = std::max(zmax, s.norm_z);
  EXPECT_LE(zmax, 5.0 * w.samples[0].norm_z);
  EXPECT_GE(w.samples[3].norm_w / w.samples[0].norm_w, 100.0);
}

TEST(WDecomposition, NormMatchesEigenvalueOracle) {
  const AtThreshold t = at_threshold(kExp);
  const std::vector<double> k{0.3, 0.03};
  const WDecomposition w = w_decomposition(t.rd, t.potential, k);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto [mu1, mu2] = top_two_eigenvalues(t.potential, k[i], t.grid);
    (void)mu2;
    EXPECT_NEAR(w.samples[i].norm_w * (1.0 - mu1), 1.0, 1e-8);
  }
}

TEST(WDecomposition, ProjectorIdempotent) {
  const AtThreshold t = at_threshold(kGauss);
  const Eigen::MatrixXd p = t.rd.u0 * t.rd.u0.transpose();
  EXPECT_LT((p * p - p).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
  EXPECT_LT(std::abs(es.eigenvalues()(p.rows() - 2)), 1e-10);
}

TEST(WDecomposition, TooSmallMomentum) {
  const AtThreshold t = at_threshold(kWell, 100);
  const std::vector<double> k{1e-15};
  try {
    w_decomposition(t.rd, t.potential, k);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_GT(e.smallest_trustworthy_k(), 1e-15);
  }
}

TEST(BindingEnergy, AtThresholdNone) {
  const AtThreshold t = at_threshold(kWell);
  EXPECT_FALSE(binding_energy(t.potential, t.grid).has_value());
}

TEST(BindingEnergy, NearThresholdLaw) {
  const AtThreshold t = at_threshold(kWell);
  const double eps = 1e-3;
  const auto b = binding_energy(t.potential.with_coupling(t.potential.coupling() * (1 + eps)),
                                t.grid);
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(b->kappa / (eps * oracle::pi * oracle::pi / 8), 1.0, 0.02);
  EXPECT_NEAR(b->kappa_shooting / b->kappa, 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(b->energy, -b->kappa * b->kappa);
}

TEST(BindingEnergy, DoubleCouplingTwoMethods) {
  const AtThreshold t = at_threshold(kWell);
  const PairPotential strong = t.potential.with_coupling(2.0 * t.potential.coupling());
  const auto b = binding_energy(strong, t.grid);
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(b->kappa_shooting / b->kappa, 1.0, 1e-6);
  EXPECT_NEAR(b->kappa / oracle::square_well_kappa(strong.strength()), 1.0, 1e-6);
}

TEST(TwoBodyInvariant, GridConvergence) {
  for (Shape s : {Shape::gaussian, Shape::exponential, Shape::square_well}) {
    for (double range : {0.5, 1.0, 2.0}) {
      const PairPotential p(s, 1.0, range);
      const double a = coupling_threshold(p, radial_grid(p, 400)).lambda_cr;
      const double b = coupling_threshold(p, radial_grid(p, 800)).lambda_cr;
      EXPECT_LT(std::abs(a / b - 1.0), 1e-6) << to_string(s) << " range " << range;
    }
  }
}

TEST(TwoBodyInvariant, BelowOneForPositiveMomentum) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const AtThreshold t = at_threshold(p);
    for (double k : logspace(1e-4, 10.0, 15)) {
      EXPECT_LT(top_two_eigenvalues(t.potential, k, t.grid).first, 1.0) << k;
    }
  }
}

TEST(TwoBodyInvariant, DominantEigenvectorNonnegative) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const AtThreshold t = at_threshold(p);
    for (double k : {0.0, 1e-3, 0.1, 1.0, 5.0}) {
      const EigSolution e = sym_eig_top(build_bs_matrix(t.potential, k, t.grid).entries, 1);
      Eigen::VectorXd v = e.vectors.col(0);
      if (v.sum() < 0) v = -v;
      EXPECT_GE(v.minCoeff(), -1e-10) << k;
    }
  }
}

TEST(TwoBodyInvariant, MuMonotoneConvex) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const AtThreshold t = at_threshold(p);
    const std::vector<double> k = linspace(0.01, 0.9 * std::min(2.0, t.rd.rho0_est), 25);
    MuCurveOptions o;
    o.rho0 = t.rd.rho0_est;
    o.window = {k.front(), k.back()};
    const MuCurve c = mu_curve(t.potential, k, t.grid, o);
    for (std::size_t i = 1; i < k.size(); ++i) EXPECT_LT(c.samples[i].mu, c.samples[i - 1].mu);
    for (std::size_t i = 1; i + 1 < k.size(); ++i) {
      EXPECT_GE(c.samples[i + 1].mu - 2 * c.samples[i].mu + c.samples[i - 1].mu, -1e-8);
    }
  }
}

TEST(TwoBodyInvariant, ACoefficientMatchesSlope) {
  for (const PairPotential& p : {kWell, kExp, kGauss}) {
    const AtThreshold t = at_threshold(p);
    MuCurveOptions o;
    o.rho0 = t.rd.rho0_est;
    const MuCurve c = mu_curve(t.potential, logspace(1e-3, 1e-2, 11), t.grid, o);
    EXPECT_NEAR(-c.slope_at_zero / t.rd.a, 1.0, 1e-2) << to_string(p.shape());
  }
}
