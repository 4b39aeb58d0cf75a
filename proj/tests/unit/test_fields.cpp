#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lorentz/bounds.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/fields.hpp"

using lorentz::ComplexGrid;
using lorentz::cplx;
using lorentz::FieldKind;
using lorentz::ScalarField;
using lorentz::ScatteringModel;
namespace mask_bits = lorentz::mask_bits;

namespace {

template <class F>
ScalarField analytic_field(const ComplexGrid& g, F f) {
  ScalarField out{g, FieldKind::potential, 1, {}, {}, {}, {}};
  out.values.resize(g.cells());
  out.mask.assign(g.cells(), 0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out.values[g.index(i, j)] = f(g.at(i, j));
  return out;
}

}  // namespace

TEST_CASE("complex grid") {
  const ComplexGrid g(9.0, 11.0, 21, -1.0, 0.0, 11);
  CHECK(g.h_re() == doctest::Approx(0.1));
  CHECK(g.h_im() == doctest::Approx(0.1));
  CHECK(g.re(20) == 11.0);
  CHECK(g.im(0) == -1.0);
  const ComplexGrid in = g.interior();
  CHECK(in.nx() == 19);
  CHECK(in.ny() == 9);
  CHECK(in.re(0) == doctest::Approx(9.1));
  CHECK(in.h_re() == g.h_re());
  CHECK_THROWS_AS(ComplexGrid(0.0, 1.0, 2, 0.0, 1.0, 5), lorentz::DomainError);
  CHECK_THROWS_AS(ComplexGrid(1.0, 0.0, 5, 0.0, 1.0, 5), lorentz::DomainError);
}

TEST_CASE("discrete Laplacian on analytic fields") {
  const ComplexGrid g(-1.0, 2.0, 31, -2.0, 0.5, 26);
  const auto quad = lorentz::density_from_potential(analytic_field(g, [](cplx k) { return k.imag() * k.imag(); }));
  CHECK(quad.kind == FieldKind::density);
  CHECK(quad.grid == g.interior());
  for (double v : quad.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-8));
  const auto harm = lorentz::density_from_potential(analytic_field(g, [](cplx k) { return (k * k).real(); }));
  for (double v : harm.values) CHECK(std::abs(v) < 1e-9);
  CHECK_THROWS_AS(lorentz::density_from_potential(quad), lorentz::DomainError);
}

TEST_CASE("point charge integrates to 2 pi") {
  // Charge at a cell centre so no lattice point sits on the singularity.
  const double h = 0.01, radius = 0.25;
  const ComplexGrid g(-0.5, 0.5, 101, -0.5, 0.5, 101);
  const cplx k0(0.5 * h, 0.5 * h);
  const auto rho = lorentz::density_from_potential(analytic_field(g, [&](cplx k) { return std::log(std::abs(k - k0)); }));
  double total = 0.0;
  for (int j = 0; j < rho.grid.ny(); ++j)
    for (int i = 0; i < rho.grid.nx(); ++i)
      if (std::abs(rho.grid.at(i, j) - k0) < radius) total += rho.value(i, j) * h * h;
  CHECK(total == doctest::Approx(2 * M_PI).epsilon(0.02));
  CHECK(h <= radius / 20);
}

TEST_CASE("single resonant scatterer") {
  const lorentz::GasGeometry geom(3, 1);
  const auto model = ScatteringModel::resonant(cplx(8.0, -0.3));
  const ComplexGrid g(7.0, 9.0, 5, -1.0, 0.2, 4);
  const auto phi = lorentz::potential_map(geom, model, g, 3, 17);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const cplx k = g.at(i, j);
      CHECK(phi.value(i, j) == doctest::Approx(std::log(std::abs(lorentz::f_inverse(model, 3, k)))).epsilon(1e-14));
      CHECK(std::abs(phi.std_error[g.index(i, j)]) < 1e-14);
    }
}

TEST_CASE("mirror symmetry and thread independence") {
  const lorentz::GasGeometry geom(3, 20);
  const auto hs = ScatteringModel::hard_sphere(0.1);
  const ComplexGrid g(-10.4, 10.4, 5, -0.6, 0.2, 5);
  for (int c = 0; c < 3; ++c) {
    const auto one = lorentz::potential_map(geom, hs, g, 1, lorentz::derive_seed(5, c));
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        if (!one.usable(i, j)) continue;
        CHECK(std::abs(one.value(i, j) - one.value(g.nx() - 1 - i, j)) <= 1e-12 * std::max(1.0, std::abs(one.value(i, j))));
      }
  }
  const auto a = lorentz::potential_map(geom, hs, g, 7, 99, 1);
  const auto b = lorentz::potential_map(geom, hs, g, 7, 99, 3);
  CHECK(a.mask == b.mask);
  for (std::size_t c = 0; c < a.values.size(); ++c) {
    if (!(a.mask[c] & mask_bits::excluded)) {
      CHECK(a.values[c] == b.values[c]);
      CHECK(a.std_error[c] == b.std_error[c]);
    }
  }
}

TEST_CASE("standard error shrinks with the ensemble") {
  const lorentz::GasGeometry geom(2, 30);
  const auto hs = ScatteringModel::hard_sphere(0.1);
  std::vector<cplx> pts;
  for (int t = 0; t < 12; ++t) pts.push_back(cplx(4.0 + 0.3 * t, -0.05 - 0.02 * t));
  const auto s1 = lorentz::sample_potential(geom, hs, pts, 200, 3);
  const auto s2 = lorentz::sample_potential(geom, hs, pts, 400, 3);
  double ratio = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) ratio += s2.std_error[p] / s1.std_error[p] / pts.size();
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("domain masks") {
  const auto hs = ScatteringModel::hard_sphere(0.1);
  CHECK(lorentz::near_domain_boundary(2, hs, cplx(0.0, -0.5), 0.1, 0.1));
  CHECK_FALSE(lorentz::near_domain_boundary(3, hs, cplx(0.0, -0.5), 0.1, 0.1));
  CHECK(lorentz::near_domain_boundary(3, hs, cplx(0.01, 0.01), 0.1, 0.1));
  // First F^{-1} pole of the 3D hard sphere: k alpha = pi.
  CHECK(lorentz::near_domain_boundary(3, hs, cplx(10 * M_PI + 0.05, 0.0), 0.1, 0.1));
  CHECK_FALSE(lorentz::near_domain_boundary(3, hs, cplx(10 * M_PI + 0.05, -0.2), 0.1, 0.1));
  CHECK_FALSE(lorentz::near_domain_boundary(3, ScatteringModel::resonant(cplx(31.4, -1)), cplx(10 * M_PI, 0.0), 0.1, 0.1));

  const lorentz::GasGeometry geom(2, 5);
  const ComplexGrid g(-0.4, 0.4, 5, -0.4, 0.4, 5);
  auto phi = lorentz::potential_map(geom, hs, g, 2, 1);
  CHECK((phi.flags(2, 0) & mask_bits::domain) != 0);
  CHECK((phi.flags(2, 2) & mask_bits::domain) != 0);
  CHECK((phi.flags(2, 4) & mask_bits::domain) == 0);
  CHECK((phi.flags(0, 0) & mask_bits::domain) == 0);
  lorentz::annotate_validity(phi, 0.3);
  CHECK((phi.flags(0, 0) & mask_bits::below_kimax) != 0);
  CHECK(phi.usable(0, 0));
  CHECK(phi.meta_value("k_imax") == "0.3");
  const auto rho = lorentz::density_from_potential(phi);
  // The centre column touches the cut or the origin; Im k > 0 off the axis is clean.
  for (int j = 0; j < rho.grid.ny(); ++j) CHECK_FALSE(rho.usable(1, j));
  CHECK(rho.usable(0, 2));
}

TEST_CASE("cuts") {
  const ComplexGrid g(0.0, 4.0, 5, -2.0, 0.0, 3);
  auto f = analytic_field(g, [](cplx k) { return k.real() * 10 + k.imag(); });
  f.mask[g.index(3, 1)] = mask_bits::failed;
  const auto col = lorentz::vertical_cut(f, 2.0);
  REQUIRE(col.size() == 3);
  CHECK(col[0].value == 18.0);
  CHECK(col[2].im_k == 0.0);
  const auto mid = lorentz::vertical_cut(f, 2.5);
  CHECK(mid[0].value == doctest::Approx(23.0));
  CHECK(mid[1].mask == mask_bits::failed);
  CHECK_THROWS_AS(lorentz::vertical_cut(f, 4.5), lorentz::DomainError);
  const auto band = lorentz::band_average_cut(f, 1.0, 3.0);
  CHECK(band[0].columns == 3);
  CHECK(band[0].mean == doctest::Approx(18.0));
  CHECK(band[1].columns == 2);
  CHECK(band[1].mean == doctest::Approx(14.0));
}

TEST_CASE("stencil cut of a harmonic potential") {
  // N = 1, d = 3: Phi = ln|k/4pi| + ln|i - (k - Re p)/Im p| is harmonic away from p.
  const lorentz::GasGeometry geom(3, 1);
  const auto model = ScatteringModel::resonant(cplx(20.0, -0.3));
  const auto cut = lorentz::stencil_density_cut(geom, model, 10.0, {-0.01, -0.1, -1.0}, 2, 4);
  for (const auto& p : cut) {
    CHECK(p.columns == 5);
    CHECK(std::abs(p.mean) < 1e-5 / (p.im_k * p.im_k));
  }
  CHECK_THROWS_AS(lorentz::stencil_density_cut(geom, model, 10.0, {0.0}, 1, 1), lorentz::DomainError);
}

TEST_CASE("field CSV round trip") {
  const lorentz::GasGeometry geom(3, 8);
  const ComplexGrid g(1.0 / 3.0, 2.0, 6, -0.7, 0.1, 4);
  auto phi = lorentz::potential_map(geom, ScatteringModel::hard_sphere(0.1), g, 3, 42);
  phi.values[3] = std::numeric_limits<double>::quiet_NaN();
  phi.mask[3] = mask_bits::failed;
  for (const ScalarField& f : {phi, lorentz::density_from_potential(phi)}) {
    std::stringstream ss;
    lorentz::write_field_csv(ss, f);
    const std::string text = ss.str();
    CHECK(text.find("# mask_encoding=") != std::string::npos);
    CHECK(text.find("re_k,im_k,value,mask_flag\n") != std::string::npos);
    const ScalarField back = lorentz::read_field_csv(ss);
    CHECK(back.grid == f.grid);
    CHECK(back.kind == f.kind);
    CHECK(back.n_configs == 3);
    CHECK(back.mask == f.mask);
    REQUIRE(back.values.size() == f.values.size());
    for (std::size_t c = 0; c < f.values.size(); ++c) {
      if (std::isnan(f.values[c])) CHECK(std::isnan(back.values[c]));
      else CHECK(back.values[c] == f.values[c]);
    }
    CHECK(back.meta_value("model") == f.meta_value("model"));
    std::stringstream again;
    lorentz::write_field_csv(again, back);
    CHECK(again.str() == text);
  }
  std::stringstream bad("# kind=potential\nre_k,im_k,value,mask_flag\n");
  CHECK_THROWS_AS(lorentz::read_field_csv(bad), lorentz::DomainError);
  CHECK(lorentz::parse_double(lorentz::format_double(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK_THROWS_AS(lorentz::parse_double("1.5x"), lorentz::DomainError);
}
