#include "lorentz/rmtstats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "lorentz/bounds.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/fields.hpp"
#include "lorentz/log.hpp"
#include "lorentz/parallel.hpp"

namespace lorentz {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Linear interpolation between order statistics.
double percentile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

bool valid(const MPParams& p) {
  return std::isfinite(p.lambda_minus) && std::isfinite(p.lambda_plus) && p.lambda_minus >= 0.0 &&
         p.lambda_plus > p.lambda_minus;
}

struct MPFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Histogram* hist;
  int inputs() const { return 2; }
  int values() const { return static_cast<int>(hist->density.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const MPParams p{x[0], x[1]};
    const std::size_t nb = hist->density.size();
    if (!valid(p)) {
      // Push the search back inside the admissible region.
      for (std::size_t b = 0; b < nb; ++b) f[b] = 1e3 + hist->density[b];
      return 0;
    }
    double prev = mp_cdf(hist->edges[0], p);
    for (std::size_t b = 0; b < nb; ++b) {
      const double next = mp_cdf(hist->edges[b + 1], p);
      f[b] = (next - prev) / (hist->edges[b + 1] - hist->edges[b]) - hist->density[b];
      prev = next;
    }
    return 0;
  }
};

}  // namespace

EigenCloud collect_cloud(const GasGeometry& geom, double k, int n_configs, std::uint64_t master_seed, int threads) {
  if (n_configs < 1) throw DomainError("collect_cloud: n_configs must be >= 1");
  if (threads <= 0) threads = default_thread_count();
  const auto dummy = ScatteringModel::resonant(cplx(k, -1.0));
  std::vector<Eigen::VectorXcd> spectra(n_configs);
  std::vector<char> ok(n_configs, 0);
  std::mutex log_mutex;
  parallel_for(static_cast<std::size_t>(n_configs), threads, [&](std::size_t c) {
    try {
      const ScattererConfig config = sample_config(geom, derive_seed(master_seed, c));
      spectra[c] = eigen_spectrum(build_matrix(MatrixKind::N, config, dummy, k)).values;
      ok[c] = 1;
    } catch (const std::exception& e) {
      std::lock_guard lock(log_mutex);
      log::warn("collect_cloud: config " + std::to_string(c) + " skipped: " + e.what());
    }
  });
  EigenCloud out;
  out.d = geom.dimension();
  out.n_scatterers = geom.size();
  out.k = k;
  out.master_seed = master_seed;
  out.n_configs = n_configs;
  for (int c = 0; c < n_configs; ++c) {
    if (!ok[c]) {
      ++out.failed_configs;
      continue;
    }
    for (Eigen::Index j = 0; j < spectra[c].size(); ++j) {
      out.samples.push_back(spectra[c][j]);
      out.config_index.push_back(c);
    }
  }
  return out;
}

CloudStats cloud_stats(const std::vector<cplx>& samples) {
  if (samples.empty()) throw DomainError("cloud_stats: no samples");
  const double n = static_cast<double>(samples.size());
  cplx mean = 0.0;
  double min_im = samples.front().imag();
  for (const cplx& z : samples) {
    mean += z;
    min_im = std::min(min_im, z.imag());
  }
  mean /= n;
  double vr = 0.0, vi = 0.0;
  for (const cplx& z : samples) {
    vr += (z.real() - mean.real()) * (z.real() - mean.real());
    vi += (z.imag() - mean.imag()) * (z.imag() - mean.imag());
  }
  const double var = (vr + vi) / n;
  const double dof = std::max(n - 1.0, 1.0);
  return {mean, std::sqrt(vr / dof / n), std::sqrt(vi / dof / n), var, std::sqrt(2.0 * var), min_im, samples.size()};
}

double cloud_radius_estimate(const GasGeometry& geom, double k) {
  const int d = geom.dimension();
  const double avg = avg_green_sq(d, k, geom.radius(), AvgMode::closed_real);
  return std::sqrt((geom.size() - 1) * avg) / std::abs(green_I(d, k, 0.0));
}

std::vector<SpiralPoint> spiral_curves(int d, double k, const std::vector<double>& s_values) {
  const cplx i0 = green_I(d, k, 0.0);
  std::vector<SpiralPoint> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    if (!(s > 0.0)) throw DomainError("spiral_curves: s must be positive");
    const cplx g = green_plus(d, k, s) / i0;
    out.push_back({s, cplx(0.0, 1.0) - g, cplx(0.0, 1.0) + g});
  }
  return out;
}

double mp_pdf(double x, const MPParams& p) {
  if (!valid(p)) throw DomainError("mp_pdf: need 0 <= lambda_minus < lambda_plus");
  if (x <= p.lambda_minus || x >= p.lambda_plus) return 0.0;
  const double c = 0.5 * kPi * std::pow(std::sqrt(p.lambda_plus) - std::sqrt(p.lambda_minus), 2);
  return std::sqrt((p.lambda_plus - x) * (x - p.lambda_minus)) / (c * x);
}

double mp_cdf(double x, const MPParams& p) {
  if (!valid(p)) throw DomainError("mp_cdf: need 0 <= lambda_minus < lambda_plus");
  if (x <= p.lambda_minus) return 0.0;
  if (x >= p.lambda_plus) return 1.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&](double t) { return mp_pdf(t, p); }, p.lambda_minus, x, 1e-12);
}

Histogram fd_histogram(const std::vector<double>& samples, double lo, double hi, int min_bins, int max_bins) {
  if (samples.size() < 2 || !(lo < hi)) throw DomainError("fd_histogram: need two samples and lo < hi");
  const double iqr = percentile(samples, 0.75) - percentile(samples, 0.25);
  const double width = 2.0 * iqr * std::pow(static_cast<double>(samples.size()), -1.0 / 3.0);
  int bins = width > 0.0 ? static_cast<int>(std::ceil((hi - lo) / width)) : min_bins;
  bins = std::clamp(bins, min_bins, max_bins);
  Histogram h;
  h.counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + (hi - lo) * b / bins);
  for (double x : samples) {
    if (x < lo || x > hi) continue;
    const int b = std::min(static_cast<int>((x - lo) / (hi - lo) * bins), bins - 1);
    ++h.counts[b];
  }
  const double total = static_cast<double>(samples.size());
  for (int b = 0; b < bins; ++b) h.density.push_back(h.counts[b] / (total * (h.edges[b + 1] - h.edges[b])));
  return h;
}

MPFit mp_fit(const std::vector<double>& samples) {
  if (samples.size() < 10) throw DomainError("mp_fit: need at least 10 samples");
  for (double x : samples)
    if (!(x > 0.0)) throw DomainError("mp_fit: samples must be positive");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const Histogram hist = fd_histogram(samples, *mn, *mx);
  MPFunctor functor{&hist};
  Eigen::NumericalDiff<MPFunctor> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<MPFunctor>> lm(numdiff);
  lm.parameters.maxfev = 2000;
  Eigen::VectorXd x(2);
  x << percentile(samples, 0.01), percentile(samples, 0.99);
  const auto status = lm.minimize(x);
  const MPParams p{x[0], x[1]};
  if (!valid(p)) throw ConvergenceError("mp_fit: degenerate fit (lambda_plus <= lambda_minus)", lm.iter);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation)
    throw ConvergenceError("mp_fit: Levenberg-Marquardt did not converge", lm.iter);
  return {p, static_cast<int>(lm.iter), lm.fvec.norm(), static_cast<int>(hist.density.size())};
}

SlopeFit marginal_slope(const std::vector<double>& samples, double lo, double hi, int bins, std::size_t min_samples) {
  if (!(lo > 0.0 && lo < hi)) throw DomainError("marginal_slope: need 0 < lo < hi");
  std::vector<double> logs;
  for (double x : samples)
    if (x >= lo && x <= hi) logs.push_back(std::log(x));
  if (logs.size() < min_samples)
    throw DomainError("marginal_slope: only " + std::to_string(logs.size()) + " samples in the window");
  Histogram h;
  if (bins > 0) {
    h = fd_histogram(logs, std::log(lo), std::log(hi), bins, bins);
  } else {
    h = fd_histogram(logs, std::log(lo), std::log(hi), 5, 50);
  }
  // Counts per log bin divided by the linear bin width give the density in x.
  const int nb = static_cast<int>(h.counts.size());
  Eigen::MatrixXd a(nb, 2);
  Eigen::VectorXd y(nb);
  for (int b = 0; b < nb; ++b) {
    if (h.counts[b] == 0) throw DomainError("marginal_slope: empty bin in the window");
    const double x0 = std::exp(h.edges[b]), x1 = std::exp(h.edges[b + 1]);
    a(b, 0) = 0.5 * (h.edges[b] + h.edges[b + 1]);
    a(b, 1) = 1.0;
    y[b] = std::log(h.counts[b] / (x1 - x0));
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  return {coef[0], coef[1] - std::log(static_cast<double>(samples.size())), nb, logs.size()};
}

bool eigenvalue_method_validity(const ScatteringModel& model, double rho, double escape_rate, double velocity) {
  if (!model.is_resonant()) throw DomainError("eigenvalue_method_validity: needs a resonant model");
  if (!(escape_rate > 0.0) || !(velocity > 0.0)) return false;
  const double ratio = std::abs(model.as_resonant().pole.imag()) * rho / (escape_rate / (2.0 * velocity));
  return ratio < kEigenvalueValidityRatio;
}

void write_cloud_csv(std::ostream& out, const EigenCloud& cloud) {
  out << "# kind=eigencloud\n# d=" << cloud.d << "\n# N=" << cloud.n_scatterers << "\n# k=" << format_double(cloud.k)
      << "\n# n_configs=" << cloud.n_configs << "\n# master_seed=" << cloud.master_seed
      << "\n# failed_configs=" << cloud.failed_configs << "\nre_nu,im_nu,config_index\n";
  for (std::size_t s = 0; s < cloud.samples.size(); ++s)
    out << format_double(cloud.samples[s].real()) << ',' << format_double(cloud.samples[s].imag()) << ','
        << cloud.config_index[s] << '\n';
}

EigenCloud read_cloud_csv(std::istream& in) {
  EigenCloud out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
      if (key == "d") out.d = std::stoi(value);
      else if (key == "N") out.n_scatterers = std::stoi(value);
      else if (key == "k") out.k = parse_double(value);
      else if (key == "n_configs") out.n_configs = std::stoi(value);
      else if (key == "master_seed") out.master_seed = std::stoull(value);
      else if (key == "failed_configs") out.failed_configs = std::stoi(value);
      continue;
    }
    if (line.rfind("re_nu", 0) == 0) continue;
    std::istringstream row(line);
    std::string re, im, idx;
    std::getline(row, re, ',');
    std::getline(row, im, ',');
    std::getline(row, idx, ',');
    out.samples.emplace_back(parse_double(re), parse_double(im));
    out.config_index.push_back(std::stoi(idx));
  }
  return out;
}

void write_report(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

}  // namespace lorentz
