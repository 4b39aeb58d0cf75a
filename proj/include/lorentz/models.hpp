#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "lorentz/green.hpp"

namespace lorentz {

/// Breit-Wigner scatterer with a single pole p, Im p < 0.
struct Resonant {
  cplx pole;
};

/// Hard-sphere s-wave scatterer of scattering length alpha > 0. Physically
/// meaningful for |k| alpha <~ 1.
struct HardSphere {
  double alpha;
};

/// Single-scatterer amplitude model.
class ScatteringModel {
public:
  ScatteringModel(Resonant r);
  ScatteringModel(HardSphere h);

  static ScatteringModel resonant(cplx pole) { return ScatteringModel(Resonant{pole}); }
  static ScatteringModel hard_sphere(double alpha) { return ScatteringModel(HardSphere{alpha}); }

  bool is_resonant() const noexcept { return std::holds_alternative<Resonant>(model_); }
  bool is_hard_sphere() const noexcept { return std::holds_alternative<HardSphere>(model_); }
  const Resonant& as_resonant() const { return std::get<Resonant>(model_); }
  const HardSphere& as_hard_sphere() const { return std::get<HardSphere>(model_); }

  /// Upper |k| of the physical validity window (alpha^{-1} for hard spheres,
  /// infinity for the resonant model, which is only meaningful near Re p).
  double validity_limit() const;

  /// Short description used in file headers, e.g. "hard_sphere alpha=0.1".
  std::string describe() const;

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), model_);
  }

private:
  std::variant<Resonant, HardSphere> model_;
};

/// F(k)^{-1} for the model in dimension d. Throws PoleError where the hard-sphere
/// I(k, alpha) vanishes.
cplx f_inverse(const ScatteringModel& model, int d, cplx k);

struct CrossSection {
  double sigma_pt;   ///< total cross section (1/k) I(k,0) |F(k)|^2
  double sigma_max;  ///< unitarity limit 1 / (k I(k,0))
};

CrossSection cross_section(const ScatteringModel& model, int d, double k);

/// Group velocity v(k). Defaults to the quadratic dispersion v = k (hbar = m = 1).
using Dispersion = std::function<double(double)>;
double default_velocity(double k);

/// sigma_pt / sigma_max below this counts as an amplitude zero.
inline constexpr double kAmplitudeZeroTol = 1e-24;

/// Scattering mean free path sigma^d / sigma_pt(k). Returns +infinity when
/// sigma_pt(k) = 0 (a hard-sphere amplitude zero).
double mean_free_path(const ScatteringModel& model, const GasGeometry& geom, double k);

/// Real k in [k_min, k_max] where F(k) = 0 (sigma_pt = 0). Empty for the
/// resonant model. For hard spheres these are alpha^{-1} times the positive
/// zeros of J_{(d-2)/2}.
std::vector<double> amplitude_zeros(const ScatteringModel& model, int d, double k_min, double k_max);

}  // namespace lorentz
