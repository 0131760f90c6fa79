#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "zerores/errors.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

double brent_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                  int max_iterations) {
  if (!(lo < hi)) throw DomainError("root bracket requires lo < hi");
  if (!(tol > 0.0)) throw DomainError("root tolerance must be positive");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "]");
  }
  std::uintmax_t iterations = static_cast<std::uintmax_t>(max_iterations);
  const auto narrow = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, narrow, iterations);
  if (std::abs(b - a) > tol) {
    throw ConvergenceError("root finder did not reach the requested bracket width");
  }
  return 0.5 * (a + b);
}

}  // namespace zerores
