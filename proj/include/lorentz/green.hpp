#pragma once

#include <complex>

#include "lorentz/specfun.hpp"

namespace lorentz {

/// Outgoing (+) or incoming (-) free Green function.
enum class Wave { outgoing, incoming };

struct BallConstants {
  double volume;   ///< V_d, volume of the unit d-ball
  double surface;  ///< S_d = d V_d
};

BallConstants ball_constants(int d);

/// Ball radius holding N scatterers at mean spacing sigma: N / (V_d R^d) = sigma^{-d}.
double gas_radius(int d, int n_scatterers, double sigma = 1.0);

/// Lorentz gas filling a d-ball at unit density. Lengths are in units of sigma.
class GasGeometry {
public:
  GasGeometry(int d, int n_scatterers, double sigma = 1.0);

  int dimension() const noexcept { return d_; }
  int size() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  double radius() const noexcept { return radius_; }
  /// Largest possible pair distance, 2R.
  double diameter() const noexcept { return 2.0 * radius_; }
  BallConstants ball() const { return ball_constants(d_); }

private:
  int d_;
  int n_;
  double sigma_;
  double radius_;
};

/// G^{+-}(k, r) = -(1/2pi) (-+ik / 2pi r)^{(d-2)/2} K_{(d-2)/2}(-+ikr).
///
/// Odd d uses the terminating closed form, which is entire in k. Even d uses
/// principal-branch powers, putting the G^+ cut on arg k = -pi/2 and the G^-
/// cut on arg k = +pi/2; evaluation on the cut throws DomainError, as does r <= 0.
cplx green_fn(Wave wave, int d, cplx k, double r);

inline cplx green_plus(int d, cplx k, double r) { return green_fn(Wave::outgoing, d, k, r); }

/// I(k, r) = -(G^+ - G^-) / 2i, with the r = 0 value (pi/2) S_d/(2pi)^d k^{d-2}.
/// Small |kr| goes through the entire series in (kr)^2, so no cut applies there.
cplx green_I(int d, cplx k, double r);

/// Probability density of the distance between two uniform points in the ball
/// of the given geometry. Throws DomainError outside [0, 2R].
double pair_distance_pdf(double s, const GasGeometry& geom);

/// Same density for a ball of radius R in dimension d.
double pair_distance_pdf(double s, int d, double radius);

}  // namespace lorentz
