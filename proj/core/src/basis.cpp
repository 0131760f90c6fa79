#include <cmath>
#include <string>

#include <Eigen/LU>

#include "zerores/errors.hpp"
#include "zerores/threebody.hpp"

namespace zerores {

std::vector<double> WidthLadder::values() const {
  if (count < 1) throw DomainError("width ladder needs at least one rung");
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("width ladder needs 0 < lo <= hi");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * i);
  out.back() = hi;
  return out;
}

BasisRecipe BasisRecipe::standard() { return {}; }

BasisRecipe BasisRecipe::doubled() {
  BasisRecipe r;
  r.pair = {0.4, 40.0, 10};
  r.spectator = {0.4, 400.0, 13};
  return r;
}

GaussianBasis make_basis(std::vector<Eigen::Matrix2d> forms) {
  if (forms.empty()) throw InputError("a Gaussian basis needs at least one form");
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const Eigen::Matrix2d& a = forms[i];
    const bool finite = a.allFinite();
    const bool symmetric = std::abs(a(0, 1) - a(1, 0)) <= 1e-14 * a.cwiseAbs().maxCoeff();
    const bool positive = a(0, 0) > 0.0 && a.determinant() > 0.0;
    if (!finite || !symmetric || !positive) {
      throw InputError("basis form " + std::to_string(i) + " is not symmetric positive definite");
    }
  }
  GaussianBasis basis;
  basis.forms = std::move(forms);
  return basis;
}

GaussianBasis make_basis(const MassConfig& masses, const BasisRecipe& recipe) {
  if (recipe.stride < 1) throw DomainError("basis stride must be positive");
  if (recipe.arrangements.empty()) throw DomainError("basis recipe lists no arrangement");
  const JacobiFrame frame = pair_coefficients(masses);
  const std::vector<double> pair_widths = recipe.pair.values();
  const std::vector<double> spectator_widths = recipe.spectator.values();

  std::vector<Eigen::Matrix2d> forms;
  int duplicates = 0;
  for (Pair arrangement : recipe.arrangements) {
    const Eigen::Matrix2d t = frame.arrangement(arrangement);
    for (std::size_t i = 0; i < pair_widths.size(); i += recipe.stride) {
      for (std::size_t j = 0; j < spectator_widths.size(); j += recipe.stride) {
        const Eigen::Vector2d d(1.0 / (pair_widths[i] * pair_widths[i]),
                                1.0 / (spectator_widths[j] * spectator_widths[j]));
        Eigen::Matrix2d a = t.transpose() * d.asDiagonal() * t;
        a(0, 1) = a(1, 0) = 0.5 * (a(0, 1) + a(1, 0));
        // Isotropic forms are the same in every arrangement; keeping copies
        // would make the overlap exactly singular.
        bool seen = false;
        for (const Eigen::Matrix2d& b : forms) {
          if ((a - b).norm() <= 1e-10 * a.norm()) {
            seen = true;
            break;
          }
        }
        if (seen) {
          ++duplicates;
          continue;
        }
        forms.push_back(a);
      }
    }
  }
  GaussianBasis basis = make_basis(std::move(forms));
  basis.duplicates_removed = duplicates;
  return basis;
}

}  // namespace zerores
