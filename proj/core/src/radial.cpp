#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zerores/errors.hpp"
#include "zerores/numerics.hpp"

namespace zerores {

namespace {

struct State {
  double u;
  double du;
};

struct Trace {
  State end;
  int nodes = 0;
};

// Classical RK4 over [0, r_max], restarting at every breakpoint. Inside a
// segment the well is sampled strictly inside the segment so a jump at the
// boundary is seen with its one-sided limit.
Trace integrate(const RadialWell& well, double energy, double r_max, int steps) {
  std::vector<double> edges{0.0};
  for (double b : well.breakpoints) {
    if (b > 0.0 && b < r_max) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.push_back(r_max);

  State s{0.0, 1.0};
  Trace trace;
  double prev_u = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double lo = edges[seg];
    const double hi = edges[seg + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(steps * (hi - lo) / r_max)));
    const double h = (hi - lo) / n;
    const double guard = 1e-12 * (hi - lo);
    const auto g = [&](double r) {
      return -(well.depth(std::clamp(r, lo + guard, hi - guard)) + energy);
    };
    for (int i = 0; i < n; ++i) {
      const double r = lo + i * h;
      const double g0 = g(r);
      const double gm = g(r + 0.5 * h);
      const double g1 = g(r + h);
      const double k1u = s.du;
      const double k1d = g0 * s.u;
      const double k2u = s.du + 0.5 * h * k1d;
      const double k2d = gm * (s.u + 0.5 * h * k1u);
      const double k3u = s.du + 0.5 * h * k2d;
      const double k3d = gm * (s.u + 0.5 * h * k2u);
      const double k4u = s.du + h * k3d;
      const double k4d = g1 * (s.u + h * k3u);
      s.u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      s.du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      if (prev_u != 0.0 && (s.u > 0.0) != (prev_u > 0.0) && s.u != 0.0) ++trace.nodes;
      if (s.u != 0.0) prev_u = s.u;
      const double mag = std::abs(s.u) + std::abs(s.du);
      if (mag > 1e100) {
        s.u /= mag;
        s.du /= mag;
        prev_u /= mag;
      }
    }
  }
  trace.end = s;
  return trace;
}

double phase(const State& s, double length) { return std::atan2(s.u, length * s.du); }

}  // namespace

RadialSolution radial_integrate(const RadialWell& well, double energy, double r_max, int steps,
                                double tol) {
  if (!(r_max > 0.0)) throw DomainError("radial integration needs r_max > 0");
  if (steps < 2) throw DomainError("radial integration needs at least two steps");
  if (energy > 0.0) throw DomainError("radial shooting is defined for E <= 0");
  if (!well.depth) throw DomainError("radial well has no depth function");

  const Trace fine = integrate(well, energy, r_max, steps);
  const Trace coarse = integrate(well, energy, r_max, steps / 2);

  RadialSolution out;
  const double norm = std::hypot(fine.end.u, fine.end.du);
  out.u = fine.end.u / norm;
  out.du = fine.end.du / norm;
  out.log_derivative = fine.end.du / fine.end.u;
  out.nodes = fine.nodes;

  double diff = phase(fine.end, r_max) - phase(coarse.end, r_max);
  diff = std::remainder(diff, std::numbers::pi);
  out.error_estimate = std::abs(diff) / 15.0;
  if (out.error_estimate > tol) {
    throw AccuracyError("radial step too coarse: phase error estimate " +
                        std::to_string(out.error_estimate) + " above tolerance");
  }
  return out;
}

}  // namespace zerores
