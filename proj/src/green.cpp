#include "lorentz/green.hpp"

#include <cmath>
#include <numbers>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

constexpr double kPi = std::numbers::pi;

cplx ipow(cplx base, int exponent) {
  if (exponent < 0) return 1.0 / ipow(base, -exponent);
  cplx result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

void check_finite(cplx value, const char* what) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) throw OverflowError(what);
}

// sum_m (-x^2/4)^m / (m! Gamma(m + nu + 1)); Gamma(nu+1) (x/2)^{-nu} J_nu(x) up to normalization.
cplx normalized_j_series(double nu, cplx x) {
  const cplx q = -0.25 * x * x;
  cplx term = 1.0 / std::tgamma(nu + 1.0);
  cplx sum = term;
  for (int m = 1; m < 4000; ++m) {
    term *= q / (static_cast<double>(m) * (m + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && std::abs(q) < m * (m + nu)) break;
  }
  return sum;
}

}  // namespace

BallConstants ball_constants(int d) {
  if (d < 1) throw DomainError("ball_constants: d must be >= 1");
  const double v = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return {v, v * d};
}

double gas_radius(int d, int n_scatterers, double sigma) {
  if (n_scatterers < 1) throw DomainError("gas_radius: N must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("gas_radius: sigma must be positive");
  return std::pow(n_scatterers / ball_constants(d).volume, 1.0 / d) * sigma;
}

GasGeometry::GasGeometry(int d, int n_scatterers, double sigma)
    : d_(d), n_(n_scatterers), sigma_(sigma), radius_(gas_radius(d, n_scatterers, sigma)) {}

cplx green_fn(Wave wave, int d, cplx k, double r) {
  if (d < 1) throw DomainError("green_fn: d must be >= 1");
  if (!(r > 0.0)) throw DomainError("green_fn: r must be positive");
  if (k == cplx(0.0, 0.0)) throw DomainError("green_fn: k = 0");

  const cplx u = wave == Wave::outgoing ? cplx(k.imag(), -k.real()) : cplx(-k.imag(), k.real());
  cplx g;
  if (d % 2 == 1) {
    if (d == 1) {
      g = -std::exp(-u * r) / (2.0 * u);
    } else {
      // (u/2pi r)^{n+1/2} K_{n+1/2}(ur) collapses to (u/2pi r)^n e^{-ur} P_n(1/2ur) / 2r.
      const int n = (d - 3) / 2;
      const cplx inv = 1.0 / (2.0 * u * r);
      cplx sum = 0.0, power = 1.0;
      double coef = 1.0;
      for (int j = 0; j <= n; ++j) {
        sum += coef * power;
        coef *= static_cast<double>((n + j + 1) * (n - j)) / static_cast<double>(j + 1);
        power *= inv;
      }
      g = -ipow(u / (2.0 * kPi * r), n) * std::exp(-u * r) * sum / (4.0 * kPi * r);
    }
  } else {
    const int n = (d - 2) / 2;
    g = -ipow(u / (2.0 * kPi * r), n) * bessel_k(Order::from_twice(2 * n), u * r) / (2.0 * kPi);
  }
  check_finite(g, "green_fn: overflow");
  return g;
}

cplx green_I(int d, cplx k, double r) {
  if (d < 1) throw DomainError("green_I: d must be >= 1");
  if (r < 0.0) throw DomainError("green_I: r must be non-negative");
  const auto ball = ball_constants(d);
  if (r == 0.0) {
    if (d == 1 && k == cplx(0.0, 0.0)) throw DomainError("green_I: k = 0 in d = 1");
    return 0.5 * kPi * ball.surface / std::pow(2.0 * kPi, d) * ipow(k, d - 2);
  }
  const cplx x = k * r;
  if (std::abs(x.real()) <= 3.0 && std::abs(x) <= 600.0) {
    if (d == 1 && k == cplx(0.0, 0.0)) throw DomainError("green_I: k = 0 in d = 1");
    const double nu = 0.5 * (d - 2);
    const cplx value = ipow(k, d - 2) / (4.0 * std::pow(4.0 * kPi, nu)) * normalized_j_series(nu, x);
    check_finite(value, "green_I: overflow");
    return value;
  }
  // I is entire with I(-k) = (-1)^d I(k); the difference of G+ and G- only
  // represents it on the right half plane, away from both cuts.
  if (k.real() < 0.0) return (d % 2 ? -1.0 : 1.0) * green_I(d, -k, r);
  const cplx gp = green_fn(Wave::outgoing, d, k, r);
  const cplx gm = green_fn(Wave::incoming, d, k, r);
  return -(gp - gm) / cplx(0.0, 2.0);
}

double pair_distance_pdf(double s, int d, double radius) {
  if (!(radius > 0.0)) throw DomainError("pair_distance_pdf: radius must be positive");
  if (!(s >= 0.0 && s <= 2.0 * radius)) throw DomainError("pair_distance_pdf: s outside [0, 2R]");
  const double z = 1.0 - s * s / (4.0 * radius * radius);
  return d * std::pow(s, d - 1) / std::pow(radius, d) * regularized_beta(std::max(z, 0.0), 0.5 * (d + 1), 0.5);
}

double pair_distance_pdf(double s, const GasGeometry& geom) {
  return pair_distance_pdf(s, geom.dimension(), geom.radius());
}

}  // namespace lorentz
