#include <cmath>
#include <random>

#include "doctest.h"
#include "lorentz/errors.hpp"
#include "lorentz/models.hpp"

using lorentz::cplx;
using lorentz::ScatteringModel;

namespace {
const cplx I(0.0, 1.0);
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS_AS(ScatteringModel::resonant(cplx(1.0, 0.0)), lorentz::DomainError);
  CHECK_THROWS_AS(ScatteringModel::resonant(cplx(1.0, 0.1)), lorentz::DomainError);
  CHECK_THROWS_AS(ScatteringModel::hard_sphere(0.0), lorentz::DomainError);
  CHECK(ScatteringModel::hard_sphere(0.5).validity_limit() == doctest::Approx(2.0));
  CHECK(std::isinf(ScatteringModel::resonant(cplx(1.0, -0.1)).validity_limit()));
}

TEST_CASE("F^-1 closed forms") {
  const auto res = ScatteringModel::resonant(cplx(10.0, -0.5));
  for (int d = 1; d <= 5; ++d)
    CHECK(rel(lorentz::f_inverse(res, d, 10.0), I * lorentz::green_I(d, 10.0, 0.0)) < 1e-15);

  const double alpha = 0.3;
  const auto hs = ScatteringModel::hard_sphere(alpha);
  for (cplx k : {cplx(1.0, 0.0), cplx(2.5, -0.4), cplx(-0.7, 0.2)}) {
    const cplx want = (k / (4 * M_PI)) * std::exp(I * k * alpha) / std::sin(k * alpha);
    CHECK(rel(lorentz::f_inverse(hs, 3, k), want) < 1e-12);
  }
  const double k = 1e-3 / alpha;
  CHECK(std::abs(lorentz::f_inverse(hs, 3, k).real() * 4 * M_PI * alpha - 1.0) < 1e-3);
  CHECK_THROWS_AS(lorentz::f_inverse(hs, 3, M_PI / alpha), lorentz::PoleError);
}

TEST_CASE("unitarity and reflection symmetry") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> kk(0.01, 30.0), cc(-8.0, 8.0);
  const auto res = ScatteringModel::resonant(cplx(5.0, -0.3));
  const auto hs = ScatteringModel::hard_sphere(0.1);
  for (int d = 1; d <= 5; ++d) {
    for (int t = 0; t < 200; ++t) {
      const double k = kk(rng);
      for (const auto& m : {res, hs}) {
        const cplx finv = lorentz::f_inverse(m, d, k);
        const double i0 = lorentz::green_I(d, k, 0.0).real();
        INFO("d=" << d << " k=" << k << " " << m.describe());
        CHECK(std::abs(finv.imag() - i0) <= 1e-10 * std::abs(i0));
        // A single Breit-Wigner pole has no mirror partner, so only the
        // hard-sphere amplitude is symmetric under k -> -conj(k).
        const cplx kc(k, cc(rng));
        if (m.is_resonant()) continue;
        CHECK(rel(lorentz::f_inverse(m, d, -std::conj(kc)), std::conj(lorentz::f_inverse(m, d, kc))) < 1e-12);
      }
    }
  }
}

TEST_CASE("cross sections") {
  const auto res = ScatteringModel::resonant(cplx(0.5, -0.01));
  const auto at = lorentz::cross_section(res, 3, 0.5);
  CHECK(at.sigma_pt == doctest::Approx(at.sigma_max).epsilon(1e-14));
  for (int d = 1; d <= 5; ++d)
    for (double k = 0.05; k < 20.0; k += 0.173) {
      for (const auto& m : {res, ScatteringModel::hard_sphere(1.0)}) {
        const auto cs = lorentz::cross_section(m, d, k);
        CHECK(cs.sigma_pt <= cs.sigma_max * (1 + 1e-12));
      }
    }
  const double alpha = 0.2;
  const auto hs = ScatteringModel::hard_sphere(alpha);
  CHECK(lorentz::cross_section(hs, 3, 1e-3 / alpha).sigma_pt ==
        doctest::Approx(4 * M_PI * alpha * alpha).epsilon(1e-3));
  CHECK(lorentz::cross_section(hs, 3, M_PI / alpha).sigma_pt < 1e-25);
  CHECK_THROWS_AS(lorentz::cross_section(hs, 3, -1.0), lorentz::DomainError);
}

TEST_CASE("mean free path") {
  lorentz::GasGeometry g2(2, 1000);
  const double ell = lorentz::mean_free_path(ScatteringModel::hard_sphere(0.1), g2, 10.0);
  CHECK(std::abs(ell - 2.5) < 0.25);
  // Unitarity-limited scatterer in 3D.
  lorentz::GasGeometry g3(3, 50);
  const double k = 3.0;
  const double sat = lorentz::mean_free_path(ScatteringModel::resonant(cplx(k, -0.2)), g3, k);
  CHECK(sat == doctest::Approx(k * k / (4 * M_PI)).epsilon(1e-13));
  lorentz::GasGeometry g3b(3, 50, 2.0);
  CHECK(lorentz::mean_free_path(ScatteringModel::resonant(cplx(k, -0.2)), g3b, k) == doctest::Approx(8 * sat));
  CHECK(std::isinf(lorentz::mean_free_path(ScatteringModel::hard_sphere(0.2), g3, M_PI / 0.2)));
}

TEST_CASE("amplitude zeros") {
  const auto z3 = lorentz::amplitude_zeros(ScatteringModel::hard_sphere(0.5), 3, -20.0, 20.0);
  REQUIRE(z3.size() == 6);
  CHECK(z3[3] == doctest::Approx(2 * M_PI).epsilon(1e-13));
  CHECK(z3[5] == doctest::Approx(6 * M_PI).epsilon(1e-13));
  CHECK(z3[0] == doctest::Approx(-6 * M_PI).epsilon(1e-13));
  const auto z2 = lorentz::amplitude_zeros(ScatteringModel::hard_sphere(0.1), 2, 0.0, 30.0);
  REQUIRE(z2.size() == 1);
  CHECK(z2[0] == doctest::Approx(24.04825557695773).epsilon(1e-12));
  const auto z1 = lorentz::amplitude_zeros(ScatteringModel::hard_sphere(1.0), 1, 0.0, 5.0);
  REQUIRE(z1.size() == 2);
  CHECK(z1[0] == doctest::Approx(M_PI / 2));
  CHECK(lorentz::amplitude_zeros(ScatteringModel::resonant(cplx(1, -1)), 3, 0, 100).empty());
}
