#pragma once

#include <limits>
#include <vector>

#include "lorentz/models.hpp"

namespace lorentz {

/// How the ball average of |G^+(k, s)|^2 over pair distances is obtained.
enum class AvgMode {
  closed_real,         ///< closed form of the far-field average, real k only
  quadrature,          ///< integral over the pair density with far-field |G^+|^2
  quadrature_exact,    ///< same with the exact |G^+|^2 (d <= 3, otherwise divergent); may overflow
  asymptotic_complex,  ///< leading term for Im k R <= -5
};

/// ln <|G^+(k, s)|^2> over s distributed as the pair distance in the ball of
/// radius R. Computed in the log domain so deep Im k does not overflow.
/// Throws DomainError on a mode/domain mismatch.
double log_avg_green_sq(int d, cplx k, double radius, AvgMode mode);

inline double avg_green_sq(int d, cplx k, double radius, AvgMode mode) {
  return std::exp(log_avg_green_sq(d, k, radius, mode));
}

/// Mode used by potential_upper_bound: closed_real on the real axis,
/// quadrature_exact for d = 2 while |Im k| 2R < 600, quadrature otherwise.
AvgMode best_avg_mode(int d, cplx k, double radius);

/// (1/2) ln[ |F^{-1}|^2 + (N - 1) <|G^+|^2> ], the bound on the resonance
/// potential from Hadamard's inequality averaged over configurations.
double potential_upper_bound(const ScatteringModel& model, const GasGeometry& geom, cplx k);
double potential_upper_bound(const ScatteringModel& model, const GasGeometry& geom, cplx k, AvgMode mode);

/// Density law (d + 3) / (4 Im k^2) of the resonance band far from the real axis.
double width_density_approx(int d, double im_k);

/// Imaginary part -(ell / 2d) (j_nu / R)^2 of the slowest diffusive decay mode.
double diffusion_rate(int d, double ell, double radius);

/// Depth -ln(eps) / (2R) below which ln|det M| loses all significant digits.
double validity_bound(double radius, double machine_eps = std::numeric_limits<double>::epsilon());

struct CurvePoint {
  double im_k;
  double value;
};

struct BandDiagnostics {
  double k_imax;
  double k_idiff;
  double mean_free_path;
  std::vector<CurvePoint> bound_curve;     ///< potential_upper_bound along the cut
  std::vector<CurvePoint> approx_density;  ///< width_density_approx along the cut
};

/// Markers and reference curves for a vertical cut Re k = re_k sampled at im_values.
/// Points with Im k >= 0 are skipped in approx_density.
BandDiagnostics band_diagnostics(const ScatteringModel& model, const GasGeometry& geom, double re_k,
                                 const std::vector<double>& im_values,
                                 double machine_eps = std::numeric_limits<double>::epsilon());

}  // namespace lorentz
