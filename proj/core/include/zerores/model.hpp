#pragma once

// Physical setup: particle masses, mass-scaled Jacobi frames and the pair
// potentials. Units are hbar = 1 with the kinetic energy -Lap_x - Lap_y in the
// Jacobi frame, so every mass dependence ends up in potential arguments.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace zerores {

enum class Pair { p12, p13, p23 };

inline constexpr std::array<Pair, 3> kAllPairs{Pair::p12, Pair::p13, Pair::p23};

std::string_view to_string(Pair pair);
Pair parse_pair(std::string_view text);

/// Particle indices (1-based) of a pair, followed by the spectator.
std::array<int, 3> pair_indices(Pair pair);

struct MassConfig {
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;
  double mu12 = 0.5, mu13 = 0.5, mu23 = 0.5;  // pair reduced masses
  double M12 = 2.0 / 3, M13 = 2.0 / 3, M23 = 2.0 / 3;  // pair-spectator reduced masses
  double alpha = 1.0;  // 1/sqrt(2 mu12): |r_2 - r_1| = alpha |x|

  double mass(int index) const;
  double reduced_mass(Pair pair) const;
  double spectator_mass(Pair pair) const;
  /// |r_i - r_j| = length_scale(ij) * |x_ij| in that pair's own Jacobi frame.
  double length_scale(Pair pair) const;
};

/// Throws DomainError for non-positive or non-finite masses.
MassConfig reduced_masses(double m1, double m2, double m3);

/// Linear maps between the defining Jacobi frame (x, y) built on pair 12 and
/// particle positions. Position vectors are taken in the centre-of-mass frame.
struct JacobiFrame {
  MassConfig masses;
  Pair defining = Pair::p12;
  /// Row i-1 holds (a, b) with r_i = a x + b y.
  Eigen::Matrix<double, 3, 2> positions;

  /// (c_x, c_y) with r_k - r_l = c_x x + c_y y, for 1-based particle indices.
  Eigen::Vector2d separation(int k, int l) const;
  /// Separation used by the pair potential: r_j - r_i for pair (ij), i < j.
  Eigen::Vector2d separation(Pair pair) const;
  /// Orthogonal 2x2 map T with (x_a, y_a) = T (x, y) for arrangement a.
  Eigen::Matrix2d arrangement(Pair pair) const;
};

JacobiFrame pair_coefficients(const MassConfig& masses);

struct JacobiPoint {
  Eigen::Vector3d x;
  Eigen::Vector3d y;
};

/// Forward Jacobi map from absolute positions.
JacobiPoint to_jacobi(const MassConfig& masses, const Eigen::Vector3d& r1,
                      const Eigen::Vector3d& r2, const Eigen::Vector3d& r3);

enum class Shape { gaussian, exponential, square_well };

std::string_view to_string(Shape shape);
Shape parse_shape(std::string_view text);

/// Witnesses for V(r) <= b1 exp(-b2 r).
struct Falloff {
  double b1 = 0.0;
  double b2 = 0.0;
};

/// Nonnegative radial pair potential  coupling * depth * f(r / range)  with
///   gaussian     f(s) = exp(-s^2)
///   exponential  f(s) = exp(-s)
///   square well  f(s) = 1 for s <= 1, else 0.
class PairPotential {
 public:
  PairPotential(Shape shape, double depth, double range, double coupling = 1.0);

  Shape shape() const noexcept { return shape_; }
  double depth() const noexcept { return depth_; }
  double range() const noexcept { return range_; }
  double coupling() const noexcept { return coupling_; }
  double strength() const noexcept { return coupling_ * depth_; }

  double operator()(double r) const;

  Falloff falloff() const;
  /// Radii where the potential is discontinuous.
  std::vector<double> breakpoints() const;

  PairPotential with_coupling(double coupling) const;
  /// The potential r -> V(scale * r).
  PairPotential with_argument_scale(double scale) const;

 private:
  Shape shape_;
  double depth_;
  double range_;
  double coupling_;
};

/// Throws DomainError for r < 0.
double evaluate_potential(const PairPotential& potential, double r);

struct FalloffCheck {
  bool holds = false;
  double worst_ratio = 0.0;  // max over samples of V(r) / (b1 exp(-b2 r))
};

FalloffCheck check_falloff(const PairPotential& potential, int samples = 10000,
                           double span_in_ranges = 50.0);

/// The three physical pair potentials V_12, V_13, V_23 (functions of |r_i - r_j|).
struct PairPotentials {
  std::array<PairPotential, 3> pairs;

  const PairPotential& operator[](Pair pair) const {
    return pairs[static_cast<int>(pair)];
  }
  PairPotential& operator[](Pair pair) { return pairs[static_cast<int>(pair)]; }
};

/// Pair potential expressed in that pair's own Jacobi coordinate, i.e. the
/// potential entering -Lap_x - V(|x| * length_scale).
PairPotential jacobi_scaled(const PairPotential& potential, const MassConfig& masses,
                            Pair pair);

}  // namespace zerores
