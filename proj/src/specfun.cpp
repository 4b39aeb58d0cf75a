#include "lorentz/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Below this modulus the ascending series is used, above kAsymptoticRadius the
// Hankel expansion. The band in between goes through Temme's CF2.
constexpr double kSeriesRadius = 2.0;
constexpr double kAsymptoticRadius = 25.0;
constexpr int kMaxIterations = 20000;

cplx half_integer_k(int n, cplx z) {
  // K_{n+1/2}(z) = sqrt(pi/2z) e^{-z} sum_j (n+j)!/(j!(n-j)!) (2z)^{-j}
  cplx sum = 0.0;
  cplx inv = 1.0 / (2.0 * z);
  cplx power = 1.0;
  double coef = 1.0;
  for (int j = 0; j <= n; ++j) {
    sum += coef * power;
    // coef_{j+1} = coef_j (n+j+1)(n-j) / (j+1)
    coef *= static_cast<double>((n + j + 1) * (n - j)) / static_cast<double>(j + 1);
    power *= inv;
  }
  return std::sqrt(kPi / (2.0 * z)) * std::exp(-z) * sum;
}

// K_0 and K_1 from the ascending series, |z| <= 2.
std::array<cplx, 2> series_k01(cplx z) {
  const cplx q = 0.25 * z * z;
  const cplx log_half = std::log(0.5 * z);
  cplx i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  cplx term = 1.0;  // (z^2/4)^k / (k!)^2
  double harmonic = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double kk = static_cast<double>(k);
    const cplx term1 = term / (kk + 1.0);  // (z^2/4)^k / (k! (k+1)!)
    i0 += term;
    i1 += term1;
    s0 += harmonic * term;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 += (-2.0 * kEuler + 2.0 * harmonic + 1.0 / (kk + 1.0)) * term1;
    if (std::abs(term) < kEps * std::abs(i0) && k > 2) break;
    term *= q / ((kk + 1.0) * (kk + 1.0));
    harmonic += 1.0 / (kk + 1.0);
  }
  i1 *= 0.5 * z;
  const cplx k0 = -(log_half + kEuler) * i0 + s0;
  const cplx k1 = 1.0 / z + log_half * i1 - 0.25 * z * s1;
  return {k0, k1};
}

// K_0 and K_1 by Temme's continued fraction (Steed's algorithm), Re z >= 0.
std::array<cplx, 2> cf2_k01(cplx z) {
  const double a1 = 0.25;
  cplx b = 2.0 * (1.0 + z);
  cplx d = 1.0 / b;
  cplx h = d, delh = d;
  cplx q1 = 0.0, q2 = 1.0;
  cplx q = a1, c = a1;
  double a = -a1;
  cplx s = 1.0 + q * delh;
  int i = 1;
  for (; i < kMaxIterations; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const cplx qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const cplx dels = q * delh;
    s += dels;
    if (std::abs(dels) < kEps * std::abs(s)) break;
  }
  if (i >= kMaxIterations) throw ConvergenceError("bessel_k: CF2 did not converge", i);
  const cplx k0 = std::sqrt(kPi / (2.0 * z)) * std::exp(-z) / s;
  const cplx k1 = k0 * (z + 0.5 - a1 * h) / z;
  return {k0, k1};
}

// I_{n+1}(z) / I_n(z) by the modified Lentz algorithm.
cplx cf1_ratio(int n, cplx z) {
  const double tiny = 1e-300;
  const cplx inv = 1.0 / z;
  cplx f = 2.0 * (n + 1) * inv;
  if (std::abs(f) < tiny) f = tiny;
  cplx c = f, d = 0.0;
  int i = 2;
  for (; i < kMaxIterations; ++i) {
    const cplx bi = 2.0 * (n + i) * inv;
    d = bi + d;
    if (std::abs(d) < tiny) d = tiny;
    c = bi + 1.0 / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  if (i >= kMaxIterations) throw ConvergenceError("bessel_k: CF1 did not converge", i);
  return 1.0 / f;
}

cplx upward(int n, cplx z, cplx k0, cplx k1) {
  if (n == 0) return k0;
  cplx prev = k0, cur = k1;
  for (int m = 1; m < n; ++m) {
    const cplx next = prev + (2.0 * m / z) * cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

cplx asymptotic_k(double nu, cplx z) {
  const double mu = 4.0 * nu * nu;
  cplx sum = 1.0, term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > last) break;  // optimal truncation
    sum += term;
    if (mag < kEps * std::abs(sum)) break;
    last = mag;
  }
  return std::sqrt(kPi / (2.0 * z)) * std::exp(-z) * sum;
}

cplx integer_k(int n, cplx z) {
  const double r = std::abs(z);
  if (r <= kSeriesRadius) {
    const auto k = series_k01(z);
    return upward(n, z, k[0], k[1]);
  }
  if (r >= kAsymptoticRadius) return asymptotic_k(n, z);
  if (z.real() >= 0.0) {
    const auto k = cf2_k01(z);
    return upward(n, z, k[0], k[1]);
  }
  // Continuation through the left half plane (DLMF 10.34.2 with m = +-1):
  // K_n(w e^{+-i pi}) = (-1)^n K_n(w) -+ i pi I_n(w), with Re w > 0.
  const cplx w = -z;
  const auto kw = cf2_k01(w);
  const cplx kn = upward(n, w, kw[0], kw[1]);
  const cplx kn1 = upward(n + 1, w, kw[0], kw[1]);
  const cplx ratio = cf1_ratio(n, w);
  const cplx in = 1.0 / (w * (kn1 + ratio * kn));  // Wronskian
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const cplx ipi(0.0, kPi);
  return z.imag() > 0.0 ? parity * kn - ipi * in : parity * kn + ipi * in;
}

}  // namespace

Order Order::from_dimension(int d) {
  if (d < 1) throw DomainError("Order: dimension must be >= 1");
  return Order(d - 2);
}

Order Order::from_twice(int twice_nu) {
  if (twice_nu < -1) throw DomainError("Order: 2 nu must be >= -1");
  return Order(twice_nu);
}

cplx bessel_k(Order nu, cplx z) {
  if (z == cplx(0.0, 0.0)) throw DomainError("bessel_k: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0) throw DomainError("bessel_k: z on the branch cut");
  if (z.real() < -745.0) throw OverflowError("bessel_k: Re z < -745 overflows");

  cplx result;
  if (nu.is_half_integer()) {
    // K_{-1/2} = K_{1/2}
    const int n = nu.twice() < 0 ? 0 : (nu.twice() - 1) / 2;
    result = half_integer_k(n, z);
  } else {
    result = integer_k(nu.twice() / 2, z);
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
    throw OverflowError("bessel_k: result not representable");
  return result;
}

double bessel_j_first_zero(Order nu) {
  static std::mutex mutex;
  static std::map<int, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(nu.twice()); it != cache.end()) return it->second;
  }

  double root;
  if (nu.twice() == -1) {
    root = 0.5 * kPi;  // J_{-1/2}(x) ~ cos(x) / sqrt(x)
  } else {
    const double v = nu.value();
    auto j = [v](double x) { return std::cyl_bessel_j(v, x); };
    // Bracket the first sign change. j_nu > nu for all nu >= 0.
    double lo = std::max(v, 0.5);
    double step = 0.05;
    double flo = j(lo);
    double hi = lo + step;
    while (j(hi) * flo > 0.0) {
      lo = hi;
      flo = j(lo);
      hi += step;
    }
    while (hi - lo > 1e-15 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (j(mid) * flo > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    root = 0.5 * (lo + hi);
  }

  std::lock_guard lock(mutex);
  cache.emplace(nu.twice(), root);
  return root;
}

double regularized_beta(double z, double a, double b) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("regularized_beta: z outside [0, 1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("regularized_beta: a, b must be positive");
  return boost::math::ibeta(a, b, z);
}

}  // namespace lorentz
