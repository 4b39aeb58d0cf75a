#include "lorentz/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lorentz/errors.hpp"

namespace lorentz {

ScatteringModel::ScatteringModel(Resonant r) : model_(r) {
  if (!(r.pole.imag() < 0.0)) throw DomainError("Resonant model: Im p must be negative");
}

ScatteringModel::ScatteringModel(HardSphere h) : model_(h) {
  if (!(h.alpha > 0.0)) throw DomainError("HardSphere model: alpha must be positive");
}

double ScatteringModel::validity_limit() const {
  if (is_hard_sphere()) return 1.0 / as_hard_sphere().alpha;
  return std::numeric_limits<double>::infinity();
}

std::string ScatteringModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (is_resonant()) {
    os << "resonant p=" << as_resonant().pole.real() << (as_resonant().pole.imag() < 0 ? "" : "+")
       << as_resonant().pole.imag() << "i";
  } else {
    os << "hard_sphere alpha=" << as_hard_sphere().alpha;
  }
  return os.str();
}

cplx f_inverse(const ScatteringModel& model, int d, cplx k) {
  const cplx i0 = green_I(d, k, 0.0);
  if (model.is_resonant()) {
    const cplx p = model.as_resonant().pole;
    return i0 * (cplx(0.0, 1.0) - (k - p.real()) / p.imag());
  }
  const double alpha = model.as_hard_sphere().alpha;
  const cplx ia = green_I(d, k, alpha);
  // I(k, alpha) / I(k, 0) is the normalised J_nu(k alpha); a zero is only hit to rounding.
  if (std::abs(ia) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(i0))
    throw PoleError("f_inverse: I(k, alpha) = 0 (hard-sphere pole)");
  const cplx value = -i0 * green_plus(d, k, alpha) / ia;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw PoleError("f_inverse: hard-sphere pole");
  return value;
}

CrossSection cross_section(const ScatteringModel& model, int d, double k) {
  if (!(k > 0.0)) throw DomainError("cross_section: k must be positive");
  const double i0 = green_I(d, k, 0.0).real();
  const double sigma_max = 1.0 / (k * i0);
  if (model.is_hard_sphere()) {
    // |F|^2 = |I(k,alpha)|^2 / (I0^2 |G+(k,alpha)|^2), finite even where F = 0.
    const double alpha = model.as_hard_sphere().alpha;
    const double ia = green_I(d, k, alpha).real();
    const double g2 = std::norm(green_plus(d, k, alpha));
    return {ia * ia / (k * i0 * g2), sigma_max};
  }
  const double finv2 = std::norm(f_inverse(model, d, k));
  return {i0 / (k * finv2), sigma_max};
}

double default_velocity(double k) { return k; }

double mean_free_path(const ScatteringModel& model, const GasGeometry& geom, double k) {
  const auto cs = cross_section(model, geom.dimension(), k);
  const double sigma_pt = cs.sigma_pt;
  // Amplitude zeros are only hit to rounding, so zero is relative to sigma_max.
  if (sigma_pt <= kAmplitudeZeroTol * cs.sigma_max) return std::numeric_limits<double>::infinity();
  return std::pow(geom.sigma(), geom.dimension()) / sigma_pt;
}

std::vector<double> amplitude_zeros(const ScatteringModel& model, int d, double k_min, double k_max) {
  std::vector<double> zeros;
  if (!model.is_hard_sphere() || !(k_max > k_min)) return zeros;
  const double alpha = model.as_hard_sphere().alpha;
  const double nu = 0.5 * (d - 2);
  // Positive zeros of J_nu(x); F(k) = 0 at |k| alpha = x.
  auto j = [nu](double x) { return nu < 0.0 ? std::cos(x) : std::cyl_bessel_j(nu, x); };
  const double x_max = std::max(std::abs(k_min), std::abs(k_max)) * alpha;
  const double step = 0.05;
  double lo = 1e-3;
  double flo = j(lo);
  std::vector<double> roots;
  while (lo < x_max) {
    const double hi = lo + step;
    const double fhi = j(hi);
    if (flo == 0.0) {
      roots.push_back(lo);
    } else if (flo * fhi < 0.0) {
      double a = lo, b = hi, fa = flo;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = j(m);
        if (fm * fa > 0.0) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    lo = hi;
    flo = fhi;
  }
  for (double x : roots) {
    const double k = x / alpha;
    if (k >= k_min && k <= k_max) zeros.push_back(k);
    if (-k >= k_min && -k <= k_max) zeros.push_back(-k);
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

}  // namespace lorentz
