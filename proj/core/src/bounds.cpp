#include "zerores/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zerores/errors.hpp"
#include "zerores/parallel.hpp"

namespace zerores {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double adaptive(F f, double a, double b, double tol, double* error = nullptr, int depth = 12) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol, &err);
  if (error) *error = err;
  if (!std::isfinite(value)) throw AccuracyError("quadrature produced a non-finite value");
  return value;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

std::string to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::gaussian: return "gaussian";
    case ProfileShape::exponential: return "exponential";
    case ProfileShape::truncated: return "truncated";
  }
  return "?";
}

ProfileShape parse_profile_shape(const std::string& text) {
  if (text == "gaussian") return ProfileShape::gaussian;
  if (text == "exponential") return ProfileShape::exponential;
  if (text == "truncated") return ProfileShape::truncated;
  throw ConfigError("unknown profile shape '" + text + "'");
}

Profile::Profile(ProfileShape shape_, double amplitude_, double width_)
    : shape(shape_), amplitude(amplitude_), width(width_) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("profile amplitude must be positive (g must not vanish)");
  }
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("profile width must be positive");
}

double Profile::operator()(double r) const {
  const double s = r / width;
  switch (shape) {
    case ProfileShape::gaussian: return amplitude * std::exp(-s * s);
    case ProfileShape::exponential: return amplitude * std::exp(-s);
    case ProfileShape::truncated: return s <= 1.0 ? amplitude : 0.0;
  }
  return 0.0;
}

double Profile::cutoff() const {
  const double decades = std::log(1e18);
  switch (shape) {
    case ProfileShape::gaussian: return width * std::sqrt(decades);
    case ProfileShape::exponential: return width * (decades + 4.0 * std::log(decades));
    case ProfileShape::truncated: return width;
  }
  return width;
}

double Profile::tail_mass(double r) const {
  const double cut = cutoff();
  if (r >= cut) return 0.0;
  const auto f = [this](double s) { return 4.0 * kPi * s * s * (*this)(s); };
  return adaptive(f, std::max(r, 0.0), cut, 1e-13);
}

double Profile::l1_norm() const { return tail_mass(0.0); }

double Profile::fourier(double p) const {
  if (p == 0.0) return l1_norm();
  const auto f = [this, p](double s) { return 4.0 * kPi * s * s * sinc(p * s) * (*this)(s); };
  return adaptive(f, 0.0, cutoff(), 1e-13);
}

double gaussian_fourier_exact(const Profile& g, double p) {
  if (g.shape != ProfileShape::gaussian) throw InputError("closed form needs a gaussian profile");
  const double w = g.width;
  return g.amplitude * std::pow(kPi, 1.5) * w * w * w * std::exp(-0.25 * p * p * w * w);
}

double lemma3_integral(const Profile& g, double eps0, double z, double tol) {
  if (!(z > 0.0)) throw DomainError("lemma3 integral needs z > 0");
  if (!(eps0 > 0.0)) throw DomainError("lemma3 integral needs eps0 > 0");
  // Panels double in width from p ~ z/4 so the knee at p ~ z is resolved.
  std::vector<double> edges{0.0};
  for (double p = 0.25 * z; p < eps0; p *= 2.0) edges.push_back(p);
  edges.push_back(eps0);
  const auto f = [&](double p) {
    const double ghat = g.fourier(p);
    const double q = p * p + z * z;
    return 4.0 * kPi * p * p * ghat * ghat / (q * std::sqrt(q));
  };
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double err = 0.0;
    total += adaptive(f, edges[i], edges[i + 1], tol, &err, 6);
    error += err;
  }
  if (error > 1e4 * tol * std::abs(total)) {
    throw AccuracyError("lemma3 integral did not converge (error estimate " +
                        std::to_string(error) + ")");
  }
  return total;
}

double quarter_mass_radius(const Profile& g) {
  const double target = 0.25 * g.l1_norm();
  double lo = 0.0;
  double hi = g.cutoff();
  for (int it = 0; it < 200 && hi - lo > 1e-14 * g.cutoff(); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g.tail_mass(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

double lemma3_lower_bound(const Profile& g, double eps0, double z) {
  if (!(z > 0.0)) throw DomainError("lemma3 bound needs z > 0");
  const double r = quarter_mass_radius(g);
  const double eps = std::min(eps0, kPi / (3.0 * r));
  const double norm = g.l1_norm();
  const double ball = 4.0 * kPi * (std::asinh(eps / z) - eps / std::hypot(eps, z));
  return norm * norm / 64.0 * ball;
}

DivergenceReport divergence_report(const Profile& g, double eps0, std::span<const double> z,
                                   int threads) {
  if (z.size() < 2) throw DomainError("divergence report needs at least two z samples");
  DivergenceReport out;
  out.radius = quarter_mass_radius(g);
  out.eps = std::min(eps0, kPi / (3.0 * out.radius));
  const double ghat0 = g.l1_norm();
  out.expected_slope = 4.0 * kPi * ghat0 * ghat0;
  out.samples.resize(z.size());
  parallel_for(z.size(), threads, [&](std::size_t i) {
    out.samples[i] = {z[i], lemma3_integral(g, eps0, z[i]), lemma3_lower_bound(g, eps0, z[i])};
  });

  const auto n = static_cast<double>(z.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : out.samples) {
    const double x = std::log(1.0 / s.z);
    sx += x;
    sy += s.j;
    sxx += x * x;
    sxy += x * s.j;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& s : out.samples) {
    const double fit = out.intercept + out.slope * std::log(1.0 / s.z);
    ss_res += (s.j - fit) * (s.j - fit);
    ss_tot += (s.j - sy / n) * (s.j - sy / n);
  }
  out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;

  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : out.samples) out.min_margin = std::min(out.min_margin, s.j / s.lower_bound);
  std::vector<DivergenceSample> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return l.z > r.z; });
  out.increasing = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].j > sorted[i - 1].j)) out.increasing = false;
  }
  return out;
}

double heat_kernel_integral(double a, double b, double tol) {
  if (!(a >= 0.0) || !(b > 0.0)) throw DomainError("heat kernel integral needs a >= 0, b > 0");
  // t = e^s: the integrand becomes exp(-2 s - a e^s - b e^{-s}).
  const auto log_f = [&](double s) { return -2.0 * s - a * std::exp(s) - b * std::exp(-s); };
  const double t_peak = b / (1.0 + std::sqrt(1.0 + a * b));
  const double s_peak = std::log(t_peak);
  const double top = log_f(s_peak);
  double s_lo = s_peak, s_hi = s_peak;
  while (log_f(s_lo) > top - 60.0) s_lo -= 1.0;
  while (log_f(s_hi) > top - 60.0) s_hi += 1.0;
  const auto f = [&](double s) { return std::exp(log_f(s)); };
  double total = 0.0;
  double error = 0.0;
  for (double s = s_lo; s < s_hi; s += 1.0) {
    double err = 0.0;
    total += adaptive(f, s, std::min(s + 1.0, s_hi), tol, &err);
    error += err;
  }
  if (error > 1e3 * tol * total) throw AccuracyError("heat kernel quadrature did not converge");
  return total;
}

double green6d(double xi, double tol) {
  if (!(xi > 0.0)) throw DomainError("green6d needs |xi| > 0");
  const double pref = 1.0 / std::pow(4.0 * kPi, 3);
  return pref / std::pow(xi, 4) * heat_kernel_integral(xi * xi, 0.25, tol);
}

double green6d_bound(double xi, double constant) {
  return constant / std::pow(xi, 4) * std::exp(-0.5 * xi);
}

double green_sharp_constant() { return 256.0 / 9.0 / std::pow(4.0 * kPi, 3); }

GreenReport green_report(std::span<const double> xi, int threads) {
  GreenReport out;
  out.identity = heat_kernel_integral(0.0, 3.0 / 16.0);
  out.samples.resize(xi.size());
  parallel_for(xi.size(), threads, [&](std::size_t i) {
    out.samples[i] = {xi[i], green6d(xi[i]), green6d_bound(xi[i], kGreenBoundConstant),
                      green6d_bound(xi[i], green_sharp_constant())};
  });
  for (const auto& s : out.samples) {
    if (!(s.g0 <= s.bound)) ++out.violations;
    if (!(s.g0 <= s.sharp_bound)) ++out.sharp_violations;
  }
  return out;
}

double zabyv_ratio(double x_norm, double distance, double delta) {
  return std::exp(-delta * distance + 2.0 * delta * x_norm) * 2.0 * x_norm / distance;
}

ZabyvResult zabyv_check(double r0, double delta, std::int64_t samples, std::uint64_t seed) {
  if (!(r0 > 0.0) || !(delta > 0.0)) throw DomainError("zabyv check needs R0 > 0 and delta > 0");
  if (samples < 1) throw DomainError("zabyv check needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto direction = [&] {
    double v[3];
    double n = 0.0;
    do {
      for (double& c : v) c = normal(rng);
      n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    } while (n < 1e-12);
    return std::array<double, 3>{v[0] / n, v[1] / n, v[2] / n};
  };
  const double span = 20.0 * std::max(r0, 1.0 / delta);

  ZabyvResult out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < samples; ++i) {
    const double rx = r0 + span * unit(rng);
    const double rp = r0 * std::cbrt(unit(rng));
    const auto ux = direction();
    const auto up = direction();
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) d2 += std::pow(rx * ux[c] - rp * up[c], 2);
    const double d = std::sqrt(d2);
    if (d == 0.0) continue;
    ++out.samples;
    const double ratio = zabyv_ratio(rx, d, delta);
    if (ratio < 1.0) ++out.violations;
    if (ratio < out.min_ratio) {
      out.min_ratio = ratio;
      out.worst_x = rx;
      out.worst_x_prime = rp;
    }
  }
  return out;
}

}  // namespace zerores
