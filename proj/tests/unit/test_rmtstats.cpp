#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "lorentz/errors.hpp"
#include "lorentz/rmtstats.hpp"

using lorentz::cplx;
using lorentz::MPParams;

namespace {

// Inverse-CDF sampling of the MP density from a tabulated CDF.
std::vector<double> sample_mp(const MPParams& p, std::size_t n, std::uint64_t seed) {
  const int m = 20000;
  std::vector<double> xs(m + 1), cdf(m + 1);
  for (int t = 0; t <= m; ++t) {
    xs[t] = p.lambda_minus + (p.lambda_plus - p.lambda_minus) * t / m;
    cdf[t] = lorentz::mp_cdf(xs[t], p);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double q = u(rng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
    const std::size_t hi = std::clamp<std::size_t>(it - cdf.begin(), 1, m);
    const double w = (q - cdf[hi - 1]) / (cdf[hi] - cdf[hi - 1]);
    x = xs[hi - 1] + w * (xs[hi] - xs[hi - 1]);
  }
  return out;
}

}  // namespace

TEST_CASE("cloud statistics for the N matrix") {
  const lorentz::GasGeometry geom(3, 40);
  const auto cloud = lorentz::collect_cloud(geom, 10.0, 16, 7);
  CHECK(cloud.samples.size() == 16 * 40);
  CHECK(cloud.failed_configs == 0);
  CHECK(cloud.config_index.back() == 15);
  const auto st = lorentz::cloud_stats(cloud.samples);
  CHECK(st.min_im > 0.0);
  CHECK(std::abs(st.mean.real()) <= 3 * st.se_re + 1e-12);
  CHECK(std::abs(st.mean.imag() - 1.0) <= 3 * st.se_im + 1e-12);
  // Trace identity per configuration.
  for (int c = 0; c < 16; ++c) {
    cplx sum = 0.0;
    for (std::size_t s = 0; s < cloud.samples.size(); ++s)
      if (cloud.config_index[s] == c) sum += cloud.samples[s];
    CHECK(std::abs(sum / 40.0 - cplx(0, 1)) < 1e-10);
  }
  const auto again = lorentz::collect_cloud(geom, 10.0, 16, 7, 3);
  CHECK(again.samples == cloud.samples);
  CHECK_THROWS_AS(lorentz::cloud_stats({}), lorentz::DomainError);
}

TEST_CASE("radius estimate") {
  CHECK(lorentz::cloud_radius_estimate(lorentz::GasGeometry(3, 100), 10.0) == doctest::Approx(0.5184).epsilon(2e-3));
  // rho^2 scales as (N - 1) R^{1-d}.
  const double r1 = lorentz::cloud_radius_estimate(lorentz::GasGeometry(3, 100), 10.0);
  const double r2 = lorentz::cloud_radius_estimate(lorentz::GasGeometry(3, 800), 10.0);
  CHECK(r2 / r1 == doctest::Approx(std::sqrt(799.0 / 99.0 / 4.0)));
}

TEST_CASE("radius grows as N^{1/2d}") {
  std::vector<double> ln_n, ln_r;
  for (int n : {50, 100, 200}) {
    const auto cloud = lorentz::collect_cloud(lorentz::GasGeometry(3, n), 10.0, 8, 21);
    ln_n.push_back(std::log(n));
    ln_r.push_back(std::log(lorentz::cloud_stats(cloud.samples).radius));
  }
  const double slope = (ln_r[2] - ln_r[0]) / (ln_n[2] - ln_n[0]);
  CHECK(slope == doctest::Approx(1.0 / 6.0).epsilon(0.3));
}

TEST_CASE("spiral curves") {
  const auto far = lorentz::spiral_curves(3, 10.0, {1e6});
  CHECK(std::abs(far[0].nu_plus - cplx(0, 1)) < 1e-6);
  CHECK(std::abs(far[0].nu_minus - cplx(0, 1)) < 1e-6);
  for (int d = 2; d <= 3; ++d) {
    const auto near = lorentz::spiral_curves(d, 10.0, {1e-6});
    INFO("d=" << d);
    CHECK(near[0].nu_plus.imag() == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(near[0].nu_minus.imag()) < 1e-3);
  }
  const cplx pole(10.0, -0.5);
  const auto pts = lorentz::spiral_curves(3, 10.0, {0.3, 1.0});
  // Affine map: point reflection through Re p scaled by |Im p|.
  const cplx k = lorentz::map_to_k_plane(pts[0].nu_plus, pole);
  CHECK(std::abs(k - (pole.real() - 0.5 * pts[0].nu_plus)) < 1e-14);
  CHECK_THROWS_AS(lorentz::spiral_curves(3, 10.0, {0.0}), lorentz::DomainError);
}

TEST_CASE("Marchenko-Pastur density") {
  boost::math::quadrature::tanh_sinh<double> rule;
  for (MPParams p : {MPParams{0.2, 3.0}, MPParams{0.0, 1.0}, MPParams{1.5, 1.6}}) {
    const double total = rule.integrate([&](double x) { return lorentz::mp_pdf(x, p); }, p.lambda_minus, p.lambda_plus);
    CHECK(std::abs(total - 1.0) <= 1e-8);
    CHECK(lorentz::mp_cdf(p.lambda_plus, p) == 1.0);
  }
  CHECK(lorentz::mp_pdf(0.1, {0.2, 3.0}) == 0.0);
  CHECK(lorentz::mp_pdf(3.5, {0.2, 3.0}) == 0.0);
  // x^{-1/2} near zero when lambda_minus = 0.
  const MPParams wide{0.0, 4.0};
  CHECK(lorentz::mp_pdf(1e-6, wide) / lorentz::mp_pdf(4e-6, wide) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK_THROWS_AS(lorentz::mp_pdf(1.0, {2.0, 1.0}), lorentz::DomainError);
}

TEST_CASE("MP fit recovers synthetic parameters") {
  const MPParams truth{0.2, 3.0};
  const auto xs = sample_mp(truth, 100000, 3);
  const auto fit = lorentz::mp_fit(xs);
  CHECK(fit.params.lambda_minus == doctest::Approx(0.2).epsilon(0.05));
  CHECK(fit.params.lambda_plus == doctest::Approx(3.0).epsilon(0.05));
  CHECK(fit.params.lambda_plus > fit.params.lambda_minus);
  CHECK_THROWS_AS(lorentz::mp_fit({1.0, 2.0}), lorentz::DomainError);
  std::vector<double> neg(20, -1.0);
  CHECK_THROWS_AS(lorentz::mp_fit(neg), lorentz::DomainError);
}

TEST_CASE("marginal slope") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> inv, flat;
  for (int t = 0; t < 100000; ++t) {
    inv.push_back(0.01 * std::pow(100.0, u(rng)));  // density 1/x on [0.01, 1]
    flat.push_back(u(rng));
  }
  CHECK(lorentz::marginal_slope(inv, 0.02, 0.5).slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(std::abs(lorentz::marginal_slope(flat, 0.05, 0.9).slope) < 0.05);
  CHECK_THROWS_AS(lorentz::marginal_slope(flat, 2.0, 3.0), lorentz::DomainError);
  CHECK_THROWS_AS(lorentz::marginal_slope(flat, 0.0, 3.0), lorentz::DomainError);
}

TEST_CASE("eigenvalue method validity") {
  auto model = [](double im) { return lorentz::ScatteringModel::resonant(cplx(10.0, im)); };
  CHECK(lorentz::eigenvalue_method_validity(model(-1e-6), 0.5, 0.2, 10.0));
  CHECK_FALSE(lorentz::eigenvalue_method_validity(model(-0.1), 1e9, 0.2, 10.0));
  // ratio exactly 0.1: 0.1 * 1 / (2 / (2 * 1)) = 0.1
  CHECK_FALSE(lorentz::eigenvalue_method_validity(model(-0.1), 1.0, 2.0, 1.0));
  CHECK_THROWS_AS(lorentz::eigenvalue_method_validity(lorentz::ScatteringModel::hard_sphere(0.1), 1, 1, 1),
                  lorentz::DomainError);
}

TEST_CASE("cloud CSV and report") {
  const auto cloud = lorentz::collect_cloud(lorentz::GasGeometry(2, 6), 3.0, 2, 1);
  std::stringstream ss;
  lorentz::write_cloud_csv(ss, cloud);
  const auto back = lorentz::read_cloud_csv(ss);
  CHECK(back.samples == cloud.samples);
  CHECK(back.config_index == cloud.config_index);
  CHECK(back.k == 3.0);
  CHECK(back.n_scatterers == 6);
  std::stringstream rep;
  lorentz::write_report(rep, {{"a", "1"}, {"b", "x"}});
  CHECK(rep.str() == "a=1\nb=x\n");
}
