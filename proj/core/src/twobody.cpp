#include "zerores/twobody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "zerores/errors.hpp"
#include "zerores/parallel.hpp"

namespace zerores {

double s_wave_green(double k, double r, double r_prime) {
  const double lo = std::min(r, r_prime);
  const double hi = std::max(r, r_prime);
  if (k == 0.0) return lo;
  // (e^{-k(hi-lo)} - e^{-k(hi+lo)}) / 2k without cancellation at small k
  return -std::exp(-k * (hi - lo)) * std::expm1(-2.0 * k * lo) / (2.0 * k);
}

double s_wave_green_row_integral(double k, double r, double r_max) {
  if (k == 0.0) return r * r_max - 0.5 * r * r;
  const double inner = 0.5 * std::pow(std::expm1(-k * r), 2);
  const double outer = 0.5 * std::expm1(-2.0 * k * r) * std::expm1(-k * (r_max - r));
  return (inner + outer) / (k * k);
}

QuadratureRule radial_grid(const PairPotential& potential, int nodes, double r_max) {
  if (r_max <= 0.0) r_max = 20.0 / potential.falloff().b2;
  std::vector<double> breaks{0.0};
  for (double b : potential.breakpoints()) {
    if (b > 0.0 && b < r_max) breaks.push_back(b);
  }
  breaks.push_back(r_max);
  const int panels = static_cast<int>(breaks.size()) - 1;
  if (nodes < panels) throw DomainError("too few radial nodes for the potential's panels");
  std::vector<int> counts(panels, nodes / panels);
  for (int p = 0; p < nodes % panels; ++p) ++counts[p];
  return composite_gauss_legendre(breaks, counts);
}

BSMatrix build_bs_matrix(const PairPotential& potential, double k, const QuadratureRule& grid,
                         KernelRule rule) {
  if (!(k >= 0.0)) throw DomainError("Birman-Schwinger momentum must be k >= 0");
  BSMatrix out{k, grid, {}, potential, rule, {}};
  const double b2 = potential.falloff().b2;
  if (grid.b < 20.0 / b2 * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "r_max = " << grid.b << " is below 20/b2 = " << 20.0 / b2
        << "; the potential tail is truncated";
    out.warnings.push_back(msg.str());
  }

  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd v(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = potential(grid.nodes[i]);
    s(i) = std::sqrt(grid.weights[i] * v(i));
  }
  Eigen::MatrixXd green(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      green(i, j) = green(j, i) = s_wave_green(k, grid.nodes[i], grid.nodes[j]);
    }
  }
  out.entries = s.asDiagonal() * green * s.asDiagonal();
  if (rule == KernelRule::subtracted) {
    const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), n);
    const Eigen::VectorXd discrete = green * w;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double exact = s_wave_green_row_integral(k, grid.nodes[i], grid.b);
      out.entries(i, i) += v(i) * (exact - discrete(i));
    }
  }
  return out;
}

std::pair<double, double> top_two_eigenvalues(const PairPotential& potential, double k,
                                              const QuadratureRule& grid) {
  const BSMatrix m = build_bs_matrix(potential, k, grid);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
  const auto& ev = solver.eigenvalues();
  const Eigen::Index n = ev.size();
  return {ev(n - 1), n > 1 ? ev(n - 2) : 0.0};
}

namespace {

double top_eigenvalue(const PairPotential& potential, double k, const QuadratureRule& grid) {
  return top_two_eigenvalues(potential, k, grid).first;
}

}  // namespace

RadialWell radial_well(const PairPotential& potential) {
  return {[potential](double r) { return potential(r); }, potential.breakpoints()};
}

double shooting_threshold(const PairPotential& potential, double lo, double hi, double r_max,
                          int steps) {
  const auto slope = [&](double lambda) {
    const PairPotential scaled = potential.with_coupling(potential.coupling() * lambda);
    return radial_integrate(radial_well(scaled), 0.0, r_max, steps).du;
  };
  return brent_root(slope, lo, hi, 1e-13 * hi);
}

double shooting_kappa(const PairPotential& potential, double kappa_guess, double r_max,
                      int steps) {
  const RadialWell well = radial_well(potential);
  // Match where the well is negligible against kappa^2; further out the
  // decaying branch drowns in the growing one.
  const double floor = 1e-13 * kappa_guess * kappa_guess;
  double r_match = r_max;
  if (potential(r_max) <= floor) {
    double inside = 0.0;
    for (int it = 0; it < 200 && r_match - inside > 1e-12 * r_max; ++it) {
      const double mid = 0.5 * (inside + r_match);
      (potential(mid) <= floor ? r_match : inside) = mid;
    }
  }
  const int match_steps = std::max(1000, static_cast<int>(steps * r_match / r_max));
  // u' + kappa u vanishes for the decaying solution; no poles unlike u'/u + kappa
  const auto mismatch = [&](double kappa) {
    const RadialSolution s = radial_integrate(well, -kappa * kappa, r_match, match_steps);
    return s.du + kappa * s.u;
  };
  double width = 1e-3;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const double lo = kappa_guess * (1.0 - std::min(width, 0.9));
    const double hi = kappa_guess * (1.0 + width);
    if ((mismatch(lo) > 0.0) != (mismatch(hi) > 0.0)) {
      return brent_root(mismatch, lo, hi, 1e-14 * hi);
    }
    width *= 3.0;
  }
  throw BracketError("shooting oracle could not bracket the bound state");
}

ThresholdResult coupling_threshold(const PairPotential& potential, const QuadratureRule& grid,
                                   ThresholdOptions options) {
  const BSMatrix m = build_bs_matrix(potential, 0.0, grid);
  const EigSolution top = sym_eig_top(m.entries, std::min<int>(2, m.entries.rows()),
                                      options.eig_tol);
  ThresholdResult out;
  out.mu_max = top.values(0);
  out.gap = top.values.size() > 1 ? top.values(0) - top.values(1) : top.values(0);
  if (!(out.mu_max > 0.0)) {
    throw DomainError("potential has no Birman-Schwinger spectrum (zero potential?)");
  }
  out.lambda_cr = 1.0 / out.mu_max;
  if (!options.cross_check) return out;

  double width = 1e-3;
  for (int attempt = 0;; ++attempt) {
    const double lo = out.lambda_cr * (1.0 - std::min(width, 0.9));
    const double hi = out.lambda_cr * (1.0 + width);
    try {
      out.lambda_shooting = shooting_threshold(potential, lo, hi, grid.b, options.shooting_steps);
      break;
    } catch (const BracketError&) {
      if (attempt >= 6) throw;
      width *= 4.0;
    }
  }
  const double rel = std::abs(out.lambda_shooting - out.lambda_cr) / out.lambda_cr;
  if (rel > 10.0 * options.tolerance) {
    std::ostringstream msg;
    msg << "threshold estimates disagree: Birman-Schwinger " << out.lambda_cr << " vs shooting "
        << out.lambda_shooting << " (relative " << rel << ")";
    throw ConsistencyError(msg.str());
  }
  return out;
}

double a_coefficient(const ResonanceData& rd, const PairPotential& potential) {
  const QuadratureRule& grid = rd.grid;
  if (static_cast<std::size_t>(rd.u0.size()) != grid.size()) {
    throw InputError("resonance vector and grid sizes differ");
  }
  double overlap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    overlap += std::sqrt(grid.weights[i]) * grid.nodes[i] * std::sqrt(potential(grid.nodes[i])) *
               rd.u0(static_cast<Eigen::Index>(i));
  }
  const double a = overlap * overlap;
  if (!(a > 0.0)) throw ConsistencyError("a-coefficient is not positive");
  return a;
}

ResonanceData resonance_function(const PairPotential& at_threshold, const QuadratureRule& grid,
                                 ResonanceOptions options) {
  const BSMatrix m = build_bs_matrix(at_threshold, 0.0, grid);
  const EigSolution top = sym_eig_top(m.entries, std::min<int>(2, m.entries.rows()));
  ResonanceData rd;
  rd.lambda_cr = at_threshold.coupling();
  rd.grid = grid;
  rd.mu0 = top.values(0);
  rd.gap = top.values.size() > 1 ? top.values(0) - top.values(1) : top.values(0);
  if (rd.gap < options.degeneracy_tol) {
    throw DegeneracyError("top eigenvalue of L(0) is degenerate; check the discretization");
  }
  rd.u0 = top.vectors.col(0);
  if (rd.u0.sum() < 0.0) rd.u0 = -rd.u0;
  rd.u0.normalize();
  rd.a = a_coefficient(rd, at_threshold);

  const auto gap_at = [&](double k) {
    const auto [m1, m2] = top_two_eigenvalues(at_threshold, k, grid);
    return m1 - m2;
  };
  double good = 0.0;
  double k = options.k_start;
  while (k <= options.k_cap && gap_at(k) >= options.gap_min) {
    good = k;
    k *= 1.5;
  }
  if (k > options.k_cap) {
    rd.rho0_est = options.k_cap;
    return rd;
  }
  if (good == 0.0) {
    rd.rho0_est = 0.0;
    return rd;
  }
  double bad = k;
  for (int it = 0; it < 12; ++it) {
    const double mid = std::sqrt(good * bad);
    (gap_at(mid) >= options.gap_min ? good : bad) = mid;
  }
  rd.rho0_est = good;
  return rd;
}

MuCurve mu_curve(const PairPotential& at_threshold, std::span<const double> k_samples,
                 const QuadratureRule& grid, MuCurveOptions options) {
  for (double k : k_samples) {
    if (!(k > 0.0)) throw DomainError("mu-curve samples must be positive");
    if (options.rho0 > 0.0 && k >= options.rho0) {
      std::ostringstream msg;
      msg << "sample k = " << k << " lies beyond rho0_est = " << options.rho0;
      throw RangeError(msg.str());
    }
  }
  MuCurve curve;
  curve.window = options.window;
  curve.samples.resize(k_samples.size());
  parallel_for(k_samples.size(), options.threads, [&](std::size_t i) {
    const auto [m1, m2] = top_two_eigenvalues(at_threshold, k_samples[i], grid);
    curve.samples[i] = {k_samples[i], m1, m1 - m2};
  });

  std::vector<double> ks, mus;
  for (const MuSample& s : curve.samples) {
    if (s.k >= options.window.lo * (1 - 1e-12) && s.k <= options.window.hi * (1 + 1e-12)) {
      ks.push_back(s.k);
      mus.push_back(s.mu);
    }
  }
  curve.fit_count = static_cast<int>(ks.size());
  if (ks.size() < 2) return curve;

  const auto n = static_cast<Eigen::Index>(ks.size());
  const Eigen::Map<const Eigen::VectorXd> kv(ks.data(), n), mv(mus.data(), n);
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = kv;
  const Eigen::Vector2d line = design.colPivHouseholderQr().solve(mv);
  curve.intercept = line(0);
  curve.slope = line(1);
  curve.residual = std::sqrt((design * line - mv).squaredNorm() / static_cast<double>(n));
  if (n >= 3) {
    Eigen::MatrixXd quad(n, 3);
    quad.col(0).setOnes();
    quad.col(1) = kv;
    quad.col(2) = kv.array().square();
    const Eigen::Vector3d c = quad.colPivHouseholderQr().solve(mv);
    curve.slope_at_zero = c(1);
  } else {
    curve.slope_at_zero = curve.slope;
  }
  return curve;
}

namespace {

double spectral_norm_symmetric(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

WDecomposition w_decomposition(const ResonanceData& rd, const PairPotential& at_threshold,
                               std::span<const double> k_samples, int threads) {
  const QuadratureRule& grid = rd.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::MatrixXd p0 = rd.u0 * rd.u0.transpose();
  // 1 - mu(k) ~ a k must stay well above the discretization error in mu(0) - 1.
  const double floor = 1e3 * (std::abs(1.0 - rd.mu0) + n * std::numeric_limits<double>::epsilon());

  WDecomposition out;
  out.samples.resize(k_samples.size());
  parallel_for(k_samples.size(), threads, [&](std::size_t idx) {
    const double k = k_samples[idx];
    if (!(k > 0.0)) throw DomainError("W(k) is only defined for k > 0");
    const BSMatrix m = build_bs_matrix(at_threshold, k, grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spec(m.entries, Eigen::EigenvaluesOnly);
    const double mu = spec.eigenvalues()(n - 1);
    const double mu2 = n > 1 ? spec.eigenvalues()(n - 2) : 0.0;
    if (1.0 - mu <= floor) {
      throw SingularityError("1 - L(k) is numerically singular at k = " + std::to_string(k),
                             floor / rd.a);
    }
    const Eigen::MatrixXd one_minus = Eigen::MatrixXd::Identity(n, n) - m.entries;
    Eigen::LLT<Eigen::MatrixXd> llt(one_minus);
    if (llt.info() != Eigen::Success) {
      throw SingularityError("1 - L(k) is not positive definite at k = " + std::to_string(k),
                             floor / rd.a);
    }
    Eigen::MatrixXd w = llt.solve(Eigen::MatrixXd::Identity(n, n));
    w = 0.5 * (w + w.transpose()).eval();
    const Eigen::MatrixXd z = w - p0 / (rd.a * k);
    out.samples[idx] = {k, mu, mu - mu2, spectral_norm_symmetric(w), spectral_norm_symmetric(z)};
  });
  return out;
}

std::optional<BindingResult> binding_energy(const PairPotential& potential,
                                            const QuadratureRule& grid, BindingOptions options) {
  const double mu0 = top_eigenvalue(potential, 0.0, grid);
  if (mu0 <= 1.0 + 1e-12) return std::nullopt;

  const auto excess = [&](double kappa) { return top_eigenvalue(potential, kappa, grid) - 1.0; };
  double lo = 0.0;
  double hi = 1e-4;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e6) throw BracketError("could not bracket the binding momentum");
  }
  BindingResult out;
  out.kappa = brent_root(excess, lo, hi, 1e-13 * hi);
  out.energy = -out.kappa * out.kappa;
  if (!options.cross_check) return out;

  out.kappa_shooting = shooting_kappa(potential, out.kappa, grid.b, options.shooting_steps);
  const double rel = std::abs(out.kappa_shooting - out.kappa) / out.kappa;
  if (rel > 10.0 * options.tolerance) {
    std::ostringstream msg;
    msg << "binding momentum estimates disagree: " << out.kappa << " vs shooting "
        << out.kappa_shooting;
    throw ConsistencyError(msg.str());
  }
  return out;
}

}  // namespace zerores
