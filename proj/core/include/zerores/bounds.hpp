#pragma once

// Numerical checks of the auxiliary estimates used in the three-body argument:
// the logarithmic divergence of J_eps(z), the six-dimensional free Green's
// function bound and the elementary Yukawa-kernel inequality.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zerores {

enum class ProfileShape { gaussian, exponential, truncated };

std::string to_string(ProfileShape shape);
ProfileShape parse_profile_shape(const std::string& text);

/// Nonnegative radial profile g(|y|) on R^3.
///   gaussian:    A exp(-r^2 / w^2)
///   exponential: A exp(-r / w)
///   truncated:   A for r <= w, 0 beyond
struct Profile {
  ProfileShape shape = ProfileShape::gaussian;
  double amplitude = 1.0;
  double width = 1.0;

  Profile() = default;
  Profile(ProfileShape shape, double amplitude, double width);

  double operator()(double r) const;
  /// Radius beyond which g is below 1e-18 of its peak (or exactly zero).
  double cutoff() const;
  double l1_norm() const;
  /// int_{|y| > r} g d^3y
  double tail_mass(double r) const;
  /// Fourier transform int e^{i p.y} g(y) d^3y = 4 pi int r^2 sinc(p r) g(r) dr, by quadrature.
  double fourier(double p) const;
};

/// Closed-form transform of the gaussian profile (self-test only).
double gaussian_fourier_exact(const Profile& g, double p);

/// J = int_{|p| <= eps0} |g^(p)|^2 / (p^2 + z^2)^{3/2} d^3p.
double lemma3_integral(const Profile& g, double eps0, double z, double tol = 1e-10);

/// Smallest r with int_{|y|>r} g = ||g||_1 / 4.
double quarter_mass_radius(const Profile& g);

/// ||g||_1^2 / 64 * int_{|p| < eps} (p^2 + z^2)^{-3/2} d^3p with eps = min(eps0, pi / (3 r)).
double lemma3_lower_bound(const Profile& g, double eps0, double z);

struct DivergenceSample {
  double z = 0.0;
  double j = 0.0;
  double lower_bound = 0.0;
};

struct DivergenceReport {
  std::vector<DivergenceSample> samples;
  double slope = 0.0;           // of J against ln(1/z)
  double intercept = 0.0;
  double r_squared = 0.0;
  double expected_slope = 0.0;  // 4 pi |g^(0)|^2
  double radius = 0.0;          // quarter-mass radius
  double eps = 0.0;             // min(eps0, pi / (3 r))
  double min_margin = 0.0;      // min over samples of J / lower_bound
  bool increasing = false;      // J grows as z shrinks
};

DivergenceReport divergence_report(const Profile& g, double eps0, std::span<const double> z,
                                   int threads = 1);

/// int_0^inf t^{-3} exp(-a t - b / t) dt by adaptive quadrature in log t.
double heat_kernel_integral(double a, double b, double tol = 1e-13);

/// Kernel of (-Delta + 1)^{-1} on R^6 at distance xi:
///   (4 pi)^{-3} xi^{-4} int_0^inf t^{-3} exp(-t xi^2 - 1/(4t)) dt.
double green6d(double xi, double tol = 1e-13);

/// Upper bound c |xi|^{-4} exp(-|xi|/2) on the six-dimensional kernel.
double green6d_bound(double xi, double constant);

struct GreenSample {
  double xi = 0.0;
  double g0 = 0.0;
  double bound = 0.0;        // with the stated constant
  double sharp_bound = 0.0;  // with (4 pi)^{-3} 256 / 9
};

struct GreenReport {
  double identity = 0.0;  // int_0^inf t^{-3} exp(-3/(16 t)) dt
  std::vector<GreenSample> samples;
  int violations = 0;
  int sharp_violations = 0;
};

/// Stated constant 4 / (9 pi) and the one implied by the 256/9 integral.
inline constexpr double kGreenBoundConstant = 4.0 / (9.0 * 3.14159265358979323846);
double green_sharp_constant();

GreenReport green_report(std::span<const double> xi, int threads = 1);

struct ZabyvResult {
  double min_ratio = 0.0;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double worst_x = 0.0;        // |x| of the worst sample
  double worst_x_prime = 0.0;  // |x'| of the worst sample
};

/// e^{-delta |x - x'|} / |x - x'| divided by e^{-2 delta |x|} / (2 |x|).
double zabyv_ratio(double x_norm, double distance, double delta);

/// Random pairs with |x| >= R0 and |x'| <= R0 from a seeded generator.
ZabyvResult zabyv_check(double r0, double delta, std::int64_t samples, std::uint64_t seed = 1);

}  // namespace zerores
