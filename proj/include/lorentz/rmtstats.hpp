#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/models.hpp"

namespace lorentz {

/// Eigenvalues of N(k) pooled over configurations, in configuration order.
struct EigenCloud {
  int d = 0;
  int n_scatterers = 0;
  double k = 0.0;
  std::uint64_t master_seed = 0;
  int n_configs = 0;
  std::vector<cplx> samples;
  std::vector<int> config_index;
  int failed_configs = 0;
};

/// Spectrum of N(k) for configurations derive_seed(master_seed, c). Configurations
/// whose eigen solve fails are logged, counted and skipped.
EigenCloud collect_cloud(const GasGeometry& geom, double k, int n_configs, std::uint64_t master_seed, int threads = 0);

struct CloudStats {
  cplx mean;
  double se_re;       ///< standard error of Re mean
  double se_im;       ///< standard error of Im mean
  double variance;    ///< E|nu - mean|^2
  double radius;      ///< sqrt(2 variance)
  double min_im;
  std::size_t count;
};

/// Throws DomainError on an empty sample.
CloudStats cloud_stats(const std::vector<cplx>& samples);

/// Circular-cloud radius rho = sqrt((N - 1) <|G^+|^2>) / |I(k, 0)| for real k.
double cloud_radius_estimate(const GasGeometry& geom, double k);

struct SpiralPoint {
  double s;
  cplx nu_plus;   ///< i - G^+(k, s) / I(k, 0)
  cplx nu_minus;  ///< i + G^+(k, s) / I(k, 0)
};

/// Two-scatterer eigenvalue curves traced by the separation s.
std::vector<SpiralPoint> spiral_curves(int d, double k, const std::vector<double>& s_values);

/// Resonance k = Re p + Im p nu for an eigenvalue nu of N(Re p).
inline cplx map_to_k_plane(cplx nu, cplx pole) { return pole.real() + pole.imag() * nu; }

struct MPParams {
  double lambda_minus;
  double lambda_plus;
};

/// sqrt((l+ - x)(x - l-)) / (C x) on [l-, l+], zero outside, C = (pi/2)(sqrt l+ - sqrt l-)^2.
double mp_pdf(double x, const MPParams& params);

/// Integral of mp_pdf over [lambda_minus, x].
double mp_cdf(double x, const MPParams& params);

struct Histogram {
  std::vector<double> edges;    ///< bins + 1 ascending edges
  std::vector<double> density;  ///< count / (total * width)
  std::vector<long> counts;
};

/// Freedman-Diaconis bin width 2 IQR n^{-1/3}, clamped to [min_bins, max_bins] bins over [lo, hi].
Histogram fd_histogram(const std::vector<double>& samples, double lo, double hi, int min_bins = 5, int max_bins = 400);

struct MPFit {
  MPParams params;
  int iterations;
  double residual_norm;
  int bins;
};

/// Least-squares fit of bin-averaged mp_pdf to a Freedman-Diaconis histogram
/// of the samples (Levenberg-Marquardt), started from the 1st and 99th
/// percentiles. Throws DomainError on bad input and ConvergenceError when the
/// fit fails or ends with lambda_plus <= lambda_minus.
MPFit mp_fit(const std::vector<double>& samples);

struct SlopeFit {
  double slope;
  double intercept;
  int bins;
  std::size_t samples_in_window;
};

/// Least-squares slope of ln(density) against ln(x) over log-spaced bins in
/// [lo, hi]. Throws DomainError when fewer than min_samples fall in the
/// window or a bin is empty.
SlopeFit marginal_slope(const std::vector<double>& samples, double lo, double hi, int bins = 0,
                        std::size_t min_samples = 200);

/// Ratio |Im p| rho / (Gamma_esc / (2 v)) below which the eigenvalue picture holds.
inline constexpr double kEigenvalueValidityRatio = 0.1;

/// True iff |Im p| rho < 0.1 Gamma_esc / (2 v). The boundary itself is false.
bool eigenvalue_method_validity(const ScatteringModel& model, double rho, double escape_rate, double velocity);

/// Rows re_nu,im_nu,config_index under a '#' header.
void write_cloud_csv(std::ostream& out, const EigenCloud& cloud);
EigenCloud read_cloud_csv(std::istream& in);

/// "key=value" lines.
void write_report(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace lorentz
