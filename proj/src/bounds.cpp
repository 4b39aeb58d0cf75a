#include "lorentz/bounds.hpp"

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kExactDepth = 600.0;

// ln |G^+(k, s)|^2 from the far-field form, exact for d = 1 and d = 3.
double log_far_field_sq(int d, cplx k, double s) {
  return (d - 3) * std::log(std::abs(k)) - std::log(4.0) - (d - 1) * std::log(2.0 * kPi * s) -
         2.0 * k.imag() * s;
}

double log_integral(int d, cplx k, double radius, bool exact) {
  const double L = 2.0 * radius;
  // Pull out the largest exponential so the integrand stays O(1).
  const double shift = k.imag() < 0.0 ? -2.0 * k.imag() * L : 0.0;
  auto integrand = [&](double s) {
    if (s <= 0.0 || s >= L) return 0.0;
    const double p = pair_distance_pdf(s, d, radius);
    if (p == 0.0) return 0.0;
    const double lg = exact ? 2.0 * std::log(std::abs(green_plus(d, k, s))) : log_far_field_sq(d, k, s);
    return std::exp(std::log(p) + lg - shift);
  };
  boost::math::quadrature::tanh_sinh<double> rule;
  const double value = rule.integrate(integrand, 0.0, L, 1e-12);
  if (!(value > 0.0) || !std::isfinite(value)) throw ConvergenceError("avg_green_sq: quadrature failed", 0);
  return std::log(value) + shift;
}

}  // namespace

double log_avg_green_sq(int d, cplx k, double radius, AvgMode mode) {
  if (d < 1) throw DomainError("avg_green_sq: d must be >= 1");
  if (!(radius > 0.0)) throw DomainError("avg_green_sq: radius must be positive");
  if (k == cplx(0.0, 0.0)) throw DomainError("avg_green_sq: k = 0");
  const double a = 0.5 * (d + 1);
  switch (mode) {
    case AvgMode::closed_real: {
      if (k.imag() != 0.0) throw DomainError("avg_green_sq: closed_real requires real k");
      return std::log(d) + std::lgamma(0.5 * (d + 2)) - std::log(2.0 * std::sqrt(kPi)) - std::lgamma(0.5 * (d + 3)) +
             (d - 3) * std::log(std::abs(k)) - (d - 1) * std::log(2.0 * kPi * radius);
    }
    case AvgMode::quadrature:
      return log_integral(d, k, radius, false);
    case AvgMode::quadrature_exact:
      if (d > 3) throw DomainError("avg_green_sq: exact |G|^2 is not integrable at s = 0 for d > 3");
      return log_integral(d, k, radius, true);
    case AvgMode::asymptotic_complex: {
      const double x = -4.0 * k.imag() * radius;
      if (!(k.imag() * radius <= -5.0)) throw DomainError("avg_green_sq: asymptotic_complex requires Im k R <= -5");
      // Prefactor from the expansion of the pair density at s = 2R (not normalised).
      const double log_prefactor = std::log(d) + 0.5 * (3 * d + 1) * std::log(2.0) - std::log(a) -
                                   std::log(boost::math::beta(a, 0.5));
      return log_prefactor + (d - 3) * std::log(std::abs(k)) - std::log(4.0) - (d - 1) * std::log(4.0 * kPi * radius) +
             std::lgamma(0.5 * (d + 3)) + x - 0.5 * (d + 3) * std::log(x);
    }
  }
  throw DomainError("avg_green_sq: unknown mode");
}

AvgMode best_avg_mode(int d, cplx k, double radius) {
  if (k.imag() == 0.0) return AvgMode::closed_real;
  // The far-field form is exact for d = 1, 3; for d = 2 the exact |G|^2 is used
  // while it stays representable.
  if (d == 2 && -k.imag() * 2.0 * radius < kExactDepth) return AvgMode::quadrature_exact;
  return AvgMode::quadrature;
}

double potential_upper_bound(const ScatteringModel& model, const GasGeometry& geom, cplx k) {
  return potential_upper_bound(model, geom, k, best_avg_mode(geom.dimension(), k, geom.radius()));
}

double potential_upper_bound(const ScatteringModel& model, const GasGeometry& geom, cplx k, AvgMode mode) {
  const int d = geom.dimension();
  const double log_finv_sq = 2.0 * std::log(std::abs(f_inverse(model, d, k)));
  if (geom.size() == 1) return 0.5 * log_finv_sq;
  const double log_pairs = std::log(geom.size() - 1.0) + log_avg_green_sq(d, k, geom.radius(), mode);
  // ln(e^a + e^b)
  const double hi = std::max(log_finv_sq, log_pairs);
  const double lo = std::min(log_finv_sq, log_pairs);
  return 0.5 * (hi + std::log1p(std::exp(lo - hi)));
}

double width_density_approx(int d, double im_k) {
  if (!(im_k < 0.0)) throw DomainError("width_density_approx: Im k must be negative");
  return (d + 3) / (4.0 * im_k * im_k);
}

double diffusion_rate(int d, double ell, double radius) {
  if (!(ell > 0.0) || !(radius > 0.0)) throw DomainError("diffusion_rate: ell and R must be positive");
  const double j = bessel_j_first_zero(Order::from_dimension(d));
  return -(ell / (2.0 * d)) * (j / radius) * (j / radius);
}

double validity_bound(double radius, double machine_eps) {
  if (!(radius > 0.0)) throw DomainError("validity_bound: R must be positive");
  if (!(machine_eps > 0.0 && machine_eps < 1.0)) throw DomainError("validity_bound: eps must lie in (0, 1)");
  return -std::log(machine_eps) / (2.0 * radius);
}

BandDiagnostics band_diagnostics(const ScatteringModel& model, const GasGeometry& geom, double re_k,
                                 const std::vector<double>& im_values, double machine_eps) {
  BandDiagnostics out;
  out.k_imax = validity_bound(geom.radius(), machine_eps);
  out.mean_free_path = mean_free_path(model, geom, re_k);
  out.k_idiff = std::isfinite(out.mean_free_path) ? diffusion_rate(geom.dimension(), out.mean_free_path, geom.radius())
                                                  : -std::numeric_limits<double>::infinity();
  for (double im : im_values) {
    out.bound_curve.push_back({im, potential_upper_bound(model, geom, cplx(re_k, im))});
    if (im < 0.0) out.approx_density.push_back({im, width_density_approx(geom.dimension(), im)});
  }
  return out;
}

}  // namespace lorentz
