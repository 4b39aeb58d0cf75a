#pragma once

#include <complex>

namespace lorentz {

using cplx = std::complex<double>;

/// Bessel order restricted to nu = (d - 2) / 2 for a dimension d >= 1, i.e. an
/// integer or half-integer >= -1/2. Stored as twice the order.
class Order {
public:
  static Order from_dimension(int d);
  static Order from_twice(int twice_nu);

  double value() const noexcept { return 0.5 * twice_; }
  int twice() const noexcept { return twice_; }
  bool is_half_integer() const noexcept { return (twice_ & 1) != 0; }

private:
  explicit Order(int twice) : twice_(twice) {}
  int twice_;
};

/// Modified Bessel function K_nu(z) on the principal branch (cut along the
/// negative real axis).
///
/// Half-integer orders use the terminating closed form. Integer orders use the
/// ascending series for |z| <= 2, Temme's continued fraction (with analytic
/// continuation through I_nu for Re z < 0) for 2 < |z| < 25, and the Hankel
/// asymptotic expansion for |z| >= 25.
///
/// Throws DomainError for z = 0 or z on the cut, OverflowError when the result
/// is not representable (always for Re z < -745).
cplx bessel_k(Order nu, cplx z);

/// First positive zero of J_nu, accurate to 1e-12 absolute. Memoized per order.
double bessel_j_first_zero(Order nu);

/// Regularized incomplete beta function I_z(a, b).
double regularized_beta(double z, double a, double b);

}  // namespace lorentz
