#include "zerores/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zerores/errors.hpp"

namespace zerores {

std::string_view to_string(Pair pair) {
  switch (pair) {
    case Pair::p12: return "12";
    case Pair::p13: return "13";
    case Pair::p23: return "23";
  }
  return "?";
}

Pair parse_pair(std::string_view text) {
  if (text == "12") return Pair::p12;
  if (text == "13") return Pair::p13;
  if (text == "23") return Pair::p23;
  throw DomainError("unknown particle pair '" + std::string(text) + "' (expected 12, 13 or 23)");
}

std::array<int, 3> pair_indices(Pair pair) {
  switch (pair) {
    case Pair::p12: return {1, 2, 3};
    case Pair::p13: return {1, 3, 2};
    case Pair::p23: return {2, 3, 1};
  }
  return {1, 2, 3};
}

double MassConfig::mass(int index) const {
  switch (index) {
    case 1: return m1;
    case 2: return m2;
    case 3: return m3;
    default: throw DomainError("particle index must be 1, 2 or 3");
  }
}

double MassConfig::reduced_mass(Pair pair) const {
  switch (pair) {
    case Pair::p12: return mu12;
    case Pair::p13: return mu13;
    case Pair::p23: return mu23;
  }
  return mu12;
}

double MassConfig::spectator_mass(Pair pair) const {
  switch (pair) {
    case Pair::p12: return M12;
    case Pair::p13: return M13;
    case Pair::p23: return M23;
  }
  return M12;
}

double MassConfig::length_scale(Pair pair) const {
  return 1.0 / std::sqrt(2.0 * reduced_mass(pair));
}

MassConfig reduced_masses(double m1, double m2, double m3) {
  for (double m : {m1, m2, m3}) {
    if (!std::isfinite(m) || m <= 0.0) {
      throw DomainError("masses must be positive and finite");
    }
  }
  MassConfig mc;
  mc.m1 = m1;
  mc.m2 = m2;
  mc.m3 = m3;
  const double total = m1 + m2 + m3;
  mc.mu12 = m1 * m2 / (m1 + m2);
  mc.mu13 = m1 * m3 / (m1 + m3);
  mc.mu23 = m2 * m3 / (m2 + m3);
  mc.M12 = (m1 + m2) * m3 / total;
  mc.M13 = (m1 + m3) * m2 / total;
  mc.M23 = (m2 + m3) * m1 / total;
  mc.alpha = 1.0 / std::sqrt(2.0 * mc.mu12);
  return mc;
}

Eigen::Vector2d JacobiFrame::separation(int k, int l) const {
  if (k < 1 || k > 3 || l < 1 || l > 3) throw DomainError("particle index must be 1, 2 or 3");
  return (positions.row(k - 1) - positions.row(l - 1)).transpose();
}

Eigen::Vector2d JacobiFrame::separation(Pair pair) const {
  const auto [i, j, l] = pair_indices(pair);
  (void)l;
  return separation(j, i);
}

Eigen::Matrix2d JacobiFrame::arrangement(Pair pair) const {
  const auto [i, j, l] = pair_indices(pair);
  const double mi = masses.mass(i);
  const double mj = masses.mass(j);
  Eigen::Matrix2d t;
  t.row(0) = std::sqrt(2.0 * masses.reduced_mass(pair)) * separation(j, i).transpose();
  t.row(1) = std::sqrt(2.0 * masses.spectator_mass(pair)) *
             (mi * separation(l, i) + mj * separation(l, j)).transpose() / (mi + mj);
  return t;
}

JacobiFrame pair_coefficients(const MassConfig& masses) {
  JacobiFrame frame;
  frame.masses = masses;
  const double s = std::sqrt(2.0 * masses.mu12);
  const double t = std::sqrt(2.0 * masses.M12);
  const double m12 = masses.m1 + masses.m2;
  const double total = m12 + masses.m3;
  frame.positions << -masses.m2 / m12 / s, -masses.m3 / total / t,
                      masses.m1 / m12 / s, -masses.m3 / total / t,
                      0.0,                  m12 / total / t;
  return frame;
}

JacobiPoint to_jacobi(const MassConfig& masses, const Eigen::Vector3d& r1,
                      const Eigen::Vector3d& r2, const Eigen::Vector3d& r3) {
  const double m12 = masses.m1 + masses.m2;
  const Eigen::Vector3d centre12 = (masses.m1 * r1 + masses.m2 * r2) / m12;
  return {std::sqrt(2.0 * masses.mu12) * (r2 - r1),
          std::sqrt(2.0 * masses.M12) * (r3 - centre12)};
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::gaussian: return "gaussian";
    case Shape::exponential: return "exponential";
    case Shape::square_well: return "square-well";
  }
  return "?";
}

Shape parse_shape(std::string_view text) {
  if (text == "gaussian") return Shape::gaussian;
  if (text == "exponential") return Shape::exponential;
  if (text == "square-well" || text == "square_well") return Shape::square_well;
  throw DomainError("unknown potential shape '" + std::string(text) + "'");
}

PairPotential::PairPotential(Shape shape, double depth, double range, double coupling)
    : shape_(shape), depth_(depth), range_(range), coupling_(coupling) {
  if (!std::isfinite(depth) || depth < 0.0) throw DomainError("potential depth must be >= 0");
  if (!std::isfinite(range) || range <= 0.0) throw DomainError("potential range must be > 0");
  if (!std::isfinite(coupling) || coupling < 0.0) {
    throw DomainError("coupling multiplier must be >= 0");
  }
}

double PairPotential::operator()(double r) const {
  const double s = r / range_;
  switch (shape_) {
    case Shape::gaussian: return strength() * std::exp(-s * s);
    case Shape::exponential: return strength() * std::exp(-s);
    case Shape::square_well: return s <= 1.0 ? strength() : 0.0;
  }
  return 0.0;
}

Falloff PairPotential::falloff() const {
  // b2 = 1/range for every shape; b1 = strength * sup_r f(r) exp(b2 r).
  double factor = 1.0;
  switch (shape_) {
    case Shape::gaussian: factor = std::exp(0.25); break;  // sup of s - s^2 at s = 1/2
    case Shape::exponential: factor = 1.0; break;
    case Shape::square_well: factor = std::exp(1.0); break;
  }
  const double s = strength();
  return {s > 0.0 ? s * factor : factor, 1.0 / range_};
}

std::vector<double> PairPotential::breakpoints() const {
  if (shape_ == Shape::square_well) return {range_};
  return {};
}

PairPotential PairPotential::with_coupling(double coupling) const {
  return PairPotential(shape_, depth_, range_, coupling);
}

PairPotential PairPotential::with_argument_scale(double scale) const {
  if (!(scale > 0.0)) throw DomainError("argument scale must be positive");
  return PairPotential(shape_, depth_, range_ / scale, coupling_);
}

double evaluate_potential(const PairPotential& potential, double r) {
  if (!(r >= 0.0)) throw DomainError("potential evaluated at negative radius");
  return potential(r);
}

FalloffCheck check_falloff(const PairPotential& potential, int samples, double span_in_ranges) {
  const Falloff f = potential.falloff();
  const double span = span_in_ranges * potential.range();
  FalloffCheck out;
  out.holds = true;
  for (int i = 0; i < samples; ++i) {
    const double r = span * i / std::max(1, samples - 1);
    const double bound = f.b1 * std::exp(-f.b2 * r);
    const double v = potential(r);
    if (bound > 0.0) out.worst_ratio = std::max(out.worst_ratio, v / bound);
    // one ulp of slack for the tangency points of the gaussian and square-well witnesses
    if (v > bound * (1.0 + 4e-16)) out.holds = false;
  }
  return out;
}

PairPotential jacobi_scaled(const PairPotential& potential, const MassConfig& masses,
                            Pair pair) {
  return potential.with_argument_scale(masses.length_scale(pair));
}

}  // namespace zerores
