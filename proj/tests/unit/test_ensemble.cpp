#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"

using namespace lorentz;

namespace {

const cplx I(0.0, 1.0);

cplx cofactor_det(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  cplx sum = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::MatrixXcd minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index cc = 0, k = 0; cc < n; ++cc)
        if (cc != c) minor(r - 1, k++) = a(r, cc);
    sum += ((c % 2) ? -1.0 : 1.0) * a(0, c) * cofactor_det(minor);
  }
  return sum;
}

Eigen::MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

ScattererConfig pair_config(int d, double s) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, d);
  x(0, 0) = -0.5 * s;
  x(1, 0) = 0.5 * s;
  return ScattererConfig(d, x);
}

}  // namespace

TEST_CASE("seed derivation and sampling determinism") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  GasGeometry geom(3, 40);
  const auto a = sample_config(geom, 99);
  const auto b = sample_config(geom, 99);
  CHECK(a.positions() == b.positions());
  CHECK(a.positions() != sample_config(geom, 100).positions());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.positions().row(i).norm() <= geom.radius());
    CHECK(a.distance(i, i) == 0.0);
    for (int j = 0; j < i; ++j) {
      CHECK(a.distance(i, j) == a.distance(j, i));
      CHECK(a.distance(i, j) > 0.0);
    }
  }
  const auto one = sample_config(GasGeometry(2, 1), 5);
  CHECK(one.size() == 1);
  CHECK(one.distances().size() == 1);
}

TEST_CASE("pair distances follow the ball density (chi-squared)") {
  const int d = 3;
  GasGeometry geom(d, 2);
  const double R = geom.radius();
  constexpr int kSamples = 10000, kBins = 25;
  std::vector<int> counts(kBins, 0);
  for (int c = 0; c < kSamples; ++c) {
    const double s = sample_config(geom, derive_seed(2024, c)).distance(0, 1);
    counts[std::min(kBins - 1, int(s / (2 * R) * kBins))]++;
  }
  double chi2 = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double lo = 2 * R * b / kBins, hi = 2 * R * (b + 1) / kBins;
    const double p = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) { return pair_distance_pdf(s, geom); }, lo, hi);
    const double expected = p * kSamples;
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  const double pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(kBins - 1), chi2));
  MESSAGE("chi2=" << chi2 << " p=" << pvalue);
  CHECK(pvalue > 0.01);
}

TEST_CASE("matrix construction") {
  const auto model = ScatteringModel::hard_sphere(0.1);
  const auto cfg = pair_config(3, 1.3);
  const cplx k(4.0, -0.3);
  const auto m = build_matrix(MatrixKind::M, cfg, model, k);
  CHECK(m.values(0, 0) == f_inverse(model, 3, k));
  CHECK(m.values(1, 1) == f_inverse(model, 3, k));
  CHECK(m.values(0, 1) == -green_plus(3, k, 1.3));
  CHECK(m.values(1, 0) == m.values(0, 1));

  const auto cfg2 = sample_config(GasGeometry(2, 30), 4);
  const auto n = build_matrix(MatrixKind::N, cfg2, model, cplx(9.0, -0.2));
  CHECK((n.values.transpose().array() == n.values.array()).all());
  for (int i = 0; i < n.size(); ++i) CHECK(n.values(i, i) == I);
  CHECK(n.values.trace() == cplx(0.0, n.size()));

  try {
    build_matrix(MatrixKind::M, cfg2, model, cplx(0.0, -1.0));
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("i=") != std::string::npos);
  }
}

TEST_CASE("log|det| via LU") {
  CHECK(log_abs_det(Eigen::MatrixXcd::Identity(5, 5)).value == 0.0);
  Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(2, 2);
  d2(0, 0) = 2.0;
  d2(1, 1) = 3.0;
  CHECK(log_abs_det(d2).value == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto a = random_matrix(5, s);
    const double want = std::log(std::abs(cofactor_det(a)));
    CHECK(std::abs(log_abs_det(a).value - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }
  Eigen::MatrixXcd sing = Eigen::MatrixXcd::Ones(3, 3);
  const auto ls = log_abs_det(sing);
  CHECK(ls.singular);
  CHECK(std::isinf(ls.value));
  sing(0, 0) = cplx(std::numeric_limits<double>::infinity(), 0);
  CHECK_THROWS_AS(log_abs_det(sing), OverflowError);
  // Determinants far beyond double range stay finite in log form.
  const Eigen::MatrixXcd big = 1e200 * Eigen::MatrixXcd::Identity(10, 10);
  CHECK(log_abs_det(big).value == doctest::Approx(10 * 200 * std::log(10.0)));
}

TEST_CASE("log|det M| is symmetric under k -> -conj(k)") {
  const auto cfg = sample_config(GasGeometry(3, 40), 8);
  for (const auto& model : {ScatteringModel::hard_sphere(0.1), ScatteringModel::hard_sphere(0.4)}) {
    for (cplx k : {cplx(10.0, -0.3), cplx(3.3, -1.2), cplx(7.0, 0.2)}) {
      const double a = log_abs_det(build_matrix(MatrixKind::M, cfg, model, k)).value;
      const double b = log_abs_det(build_matrix(MatrixKind::M, cfg, model, -std::conj(k))).value;
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("spectrum of N(k)") {
  const double k = 10.0, s = 0.37;
  const auto cfg = pair_config(3, s);
  const auto n = build_matrix(MatrixKind::N, cfg, ScatteringModel::hard_sphere(0.1), k);
  const auto spec = eigen_spectrum(n, true);
  const cplx g = green_plus(3, k, s) / green_I(3, k, 0.0);
  std::vector<cplx> got(spec.values.data(), spec.values.data() + 2);
  std::vector<cplx> want = {I - g, I + g};
  auto by_re = [](cplx a, cplx b) { return a.real() < b.real(); };
  std::sort(got.begin(), got.end(), by_re);
  std::sort(want.begin(), want.end(), by_re);
  CHECK(std::abs(got[0] - want[0]) < 1e-13);
  CHECK(std::abs(got[1] - want[1]) < 1e-13);
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXcd v = spec.vectors.col(c);
    CHECK(std::abs(std::abs(v(0)) - M_SQRT1_2) < 1e-12);
    CHECK(std::abs(std::abs(v(1)) - M_SQRT1_2) < 1e-12);
  }

  const auto cfg30 = sample_config(GasGeometry(3, 30), 17);
  const auto n30 = build_matrix(MatrixKind::N, cfg30, ScatteringModel::hard_sphere(0.1), k);
  const auto sp = eigen_spectrum(n30, true);
  CHECK(std::abs(sp.values.mean() - I) < 1e-12);
  const double norm = n30.values.norm();
  for (int c = 0; c < 30; ++c)
    CHECK((n30.values * sp.vectors.col(c) - sp.values(c) * sp.vectors.col(c)).norm() <= 1e-8 * norm);
}

TEST_CASE("eigenvalues of N(k) lie in the upper half plane for real k") {
  for (int d : {2, 3}) {
    GasGeometry geom(d, 60);
    double min_im = 1e300;
    for (int c = 0; c < 1000; ++c) {
      const auto cfg = sample_config(geom, derive_seed(77 + d, c));
      const auto sp = eigen_spectrum(build_matrix(MatrixKind::N, cfg, ScatteringModel::hard_sphere(0.1), 10.0));
      min_im = std::min(min_im, sp.values.imag().minCoeff());
    }
    INFO("d=" << d << " min Im nu=" << min_im);
    CHECK(min_im > 0.0);
  }
}

TEST_CASE("smallest eigenpair") {
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = 10.0;
  diag(2, 2) = 100.0;
  CHECK(std::abs(smallest_eigenpair(diag).value - 1.0) < 1e-12);
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto a = random_matrix(8, 100 + s);
    const auto all = eigen_spectrum(a).values;
    Eigen::Index idx;
    all.cwiseAbs().minCoeff(&idx);
    const auto p = smallest_eigenpair(a);
    INFO("seed " << s);
    CHECK(std::abs(p.value - all(idx)) <= 1e-6 * std::max(1.0, std::abs(all(idx))));
    CHECK(p.residual <= 1e-8);
  }
  Eigen::MatrixXcd sing = Eigen::MatrixXcd::Ones(4, 4);
  const auto p = smallest_eigenpair(sing);
  CHECK(p.value == cplx(0.0, 0.0));
  CHECK((sing * p.vector).norm() < 1e-14);
  CHECK(p.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("root refinement") {
  const cplx pole(3.0, -0.2);
  const auto res = ScatteringModel::resonant(pole);
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(1, 3);
  const ScattererConfig single(3, x0);
  const auto r1 = refine_root(single, res, pole + 0.05);
  CHECK(std::abs(r1.k - pole) < 1e-10);

  const auto hs = ScatteringModel::hard_sphere(0.1);
  const auto cfg = sample_config(GasGeometry(3, 5), 3);
  const cplx k0(4.1, -0.6);
  const auto a = refine_root(cfg, hs, k0);
  const auto m = build_matrix(MatrixKind::M, cfg, hs, a.k);
  CHECK(std::abs(smallest_eigenpair(m).value) <= 1e-8 * m.values.norm());
  const auto b = refine_root(cfg, hs, -std::conj(k0));
  CHECK(std::abs(b.k + std::conj(a.k)) < 1e-9);
}

TEST_CASE("scattered amplitudes") {
  const auto hs = ScatteringModel::hard_sphere(0.2);
  const double k = 2.7;
  Eigen::MatrixXd x1(1, 2);
  x1 << 0.3, -0.4;
  const ScattererConfig one(2, x1);
  Eigen::VectorXd dir(2);
  dir << 1.0, 0.0;
  const auto s1 = scattered_amplitudes(one, hs, k, dir);
  const cplx phi = std::exp(I * k * 0.3);
  CHECK(std::abs(s1.amplitudes()(0) - phi / f_inverse(hs, 2, k)) < 1e-14);

  const auto cfg = sample_config(GasGeometry(2, 25), 12);
  const auto sol = scattered_amplitudes(cfg, hs, k, dir);
  const auto m = build_matrix(MatrixKind::M, cfg, hs, k);
  CHECK((m.values * sol.amplitudes() - sol.incident()).norm() <= 1e-10 * sol.incident().norm());

  const auto pair = pair_config(2, 1.1);
  Eigen::VectorXd normal(2);
  normal << 0.0, 1.0;
  const auto sp = scattered_amplitudes(pair, hs, k, normal);
  CHECK(std::abs(sp.amplitudes()(0) - sp.amplitudes()(1)) < 1e-14);
  Eigen::VectorXd r(2);
  r << 0.0, 3.0;
  CHECK(std::isfinite(std::abs(sp.psi(r))));
}
