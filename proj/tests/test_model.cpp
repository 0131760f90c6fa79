#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "zerores/errors.hpp"
#include "zerores/model.hpp"

using namespace zerores;

namespace {

std::vector<PairPotential> shipped_potentials() {
  std::vector<PairPotential> out;
  for (Shape s : {Shape::gaussian, Shape::exponential, Shape::square_well}) {
    for (double depth : {0.5, 1.0, 3.0}) {
      for (double range : {0.5, 1.0, 2.0}) out.emplace_back(s, depth, range);
    }
  }
  return out;
}

Eigen::Vector3d random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 2.0);
  return {n(rng), n(rng), n(rng)};
}

}  // namespace

TEST(ReducedMasses, EqualMasses) {
  const MassConfig m = reduced_masses(1, 1, 1);
  EXPECT_DOUBLE_EQ(m.mu12, 0.5);
  EXPECT_DOUBLE_EQ(m.M12, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.alpha, 1.0);
}

TEST(ReducedMasses, HeavySpectatorLimit) {
  const MassConfig m = reduced_masses(1, 1, 1e6);
  // (m1 + m2) m3 / (m1 + m2 + m3) -> m1 + m2
  EXPECT_NEAR(m.M12 / 2.0, 1.0, 1e-5);
}

TEST(ReducedMasses, DirectArithmetic) {
  const MassConfig m = reduced_masses(2, 3, 4);
  EXPECT_NEAR(m.mu23, 12.0 / 7.0, 1e-15);
  EXPECT_NEAR(m.mu13, 8.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.M23, 7.0 * 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(m.alpha, 1.0 / std::sqrt(2.0 * 1.2), 1e-15);
}

TEST(ReducedMasses, SymmetricWithinPair) {
  const MassConfig a = reduced_masses(2, 5, 3);
  const MassConfig b = reduced_masses(5, 2, 3);
  EXPECT_DOUBLE_EQ(a.mu12, b.mu12);
  EXPECT_DOUBLE_EQ(a.M12, b.M12);
}

TEST(ReducedMasses, RejectsBadMasses) {
  EXPECT_THROW(reduced_masses(-1, 1, 1), DomainError);
  EXPECT_THROW(reduced_masses(1, 0, 1), DomainError);
  EXPECT_THROW(reduced_masses(1, 1, INFINITY), DomainError);
  EXPECT_THROW(reduced_masses(1, NAN, 1), DomainError);
}

TEST(PairCoefficients, DefiningPair) {
  const JacobiFrame f = pair_coefficients(reduced_masses(1, 1, 1));
  const Eigen::Vector2d c = f.separation(Pair::p12);
  EXPECT_NEAR(c(0), 1.0, 1e-15);
  EXPECT_NEAR(c(1), 0.0, 1e-15);

  const JacobiFrame g = pair_coefficients(reduced_masses(2, 3, 7));
  EXPECT_NEAR(g.separation(Pair::p12)(0), 1.0 / std::sqrt(2.0 * 1.2), 1e-15);
  EXPECT_EQ(g.separation(Pair::p12)(1), 0.0);
}

TEST(PairCoefficients, ExchangeSymmetry) {
  const JacobiFrame f = pair_coefficients(reduced_masses(1, 1, 1));
  EXPECT_NEAR(f.separation(Pair::p13).norm(), f.separation(Pair::p23).norm(), 1e-15);
}

TEST(PairCoefficients, BruteForceSubstitution) {
  const MassConfig m = reduced_masses(1, 2, 3);
  const JacobiFrame f = pair_coefficients(m);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d r1 = random_vector(rng), r2 = random_vector(rng),
                          r3 = random_vector(rng);
    // direct definitions, independent of the library's map
    const Eigen::Vector3d x = std::sqrt(2.0 * m.mu12) * (r2 - r1);
    const Eigen::Vector3d y =
        std::sqrt(2.0 * m.M12) * (r3 - (m.m1 * r1 + m.m2 * r2) / (m.m1 + m.m2));
    const Eigen::Vector2d c = f.separation(1, 3);
    const Eigen::Vector3d got = c(0) * x + c(1) * y;
    EXPECT_LT((got - (r1 - r3)).norm(), 1e-12 * (1.0 + (r1 - r3).norm()));
  }
}

TEST(PairCoefficients, ArrangementIsOrthogonal) {
  const JacobiFrame f = pair_coefficients(reduced_masses(1, 2, 3));
  for (Pair p : kAllPairs) {
    const Eigen::Matrix2d t = f.arrangement(p);
    EXPECT_LT((t * t.transpose() - Eigen::Matrix2d::Identity()).norm(), 1e-13);
  }
}

TEST(EvaluatePotential, Examples) {
  EXPECT_DOUBLE_EQ(evaluate_potential({Shape::gaussian, 1, 1}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_potential({Shape::square_well, 2, 1}, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(evaluate_potential({Shape::square_well, 2, 1}, 0.5), 2.0);
  EXPECT_NEAR(evaluate_potential({Shape::exponential, 1, 1}, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_THROW(evaluate_potential({Shape::gaussian, 1, 1}, -0.1), DomainError);
}

TEST(EvaluatePotential, ShapeNames) {
  for (Shape s : {Shape::gaussian, Shape::exponential, Shape::square_well}) {
    EXPECT_EQ(parse_shape(to_string(s)), s);
  }
  EXPECT_THROW(parse_shape("lorentzian"), InputError);
}

TEST(ModelInvariant, FalloffWitnessHolds) {
  for (const PairPotential& p : shipped_potentials()) {
    const FalloffCheck c = check_falloff(p, 10000, 50.0);
    EXPECT_TRUE(c.holds) << to_string(p.shape()) << " depth " << p.depth() << " range "
                         << p.range() << " ratio " << c.worst_ratio;
    const Falloff f = p.falloff();
    for (int i = 0; i <= 10000; ++i) {
      const double r = 50.0 * p.range() * i / 10000.0;
      EXPECT_LE(p(r), f.b1 * std::exp(-f.b2 * r) * (1.0 + 1e-14));
    }
  }
}

TEST(ModelInvariant, JacobiRoundTrip) {
  std::mt19937_64 rng(11);
  for (const auto& masses : {reduced_masses(1, 1, 1), reduced_masses(1, 2, 3),
                             reduced_masses(0.1, 5, 40)}) {
    const JacobiFrame f = pair_coefficients(masses);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Vector3d r[3] = {random_vector(rng), random_vector(rng), random_vector(rng)};
      const JacobiPoint j = to_jacobi(masses, r[0], r[1], r[2]);
      for (int k = 1; k <= 3; ++k) {
        for (int l = k + 1; l <= 3; ++l) {
          const Eigen::Vector2d c = f.separation(k, l);
          const double got = (c(0) * j.x + c(1) * j.y).norm();
          const double want = (r[k - 1] - r[l - 1]).norm();
          EXPECT_NEAR(got, want, 1e-12 * (1.0 + want));
        }
      }
    }
  }
}

TEST(ModelInvariant, CouplingScalesLinearly) {
  for (const PairPotential& p : shipped_potentials()) {
    const PairPotential twice = p.with_coupling(2.0);
    for (int i = 0; i <= 200; ++i) {
      const double r = 5.0 * p.range() * i / 200.0;
      EXPECT_EQ(twice(r), 2.0 * p(r));
    }
  }
}

TEST(ModelInvariant, PotentialNonnegative) {
  for (const PairPotential& p : shipped_potentials()) {
    for (int i = 0; i <= 1000; ++i) EXPECT_GE(p(10.0 * p.range() * i / 1000.0), 0.0);
  }
}
