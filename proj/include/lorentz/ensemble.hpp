#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lorentz/models.hpp"

namespace lorentz {

/// i-th output of a splitmix64 stream started at master_seed. Seeds for
/// configuration c of an ensemble are derive_seed(master, c), so ensembles do
/// not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// One random realisation of the gas: N points in the d-ball plus the pair
/// distance matrix.
class ScattererConfig {
public:
  ScattererConfig(int d, Eigen::MatrixXd positions, std::uint64_t seed = 0);

  int dimension() const noexcept { return d_; }
  int size() const noexcept { return static_cast<int>(positions_.rows()); }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Row i is the position of scatterer i.
  const Eigen::MatrixXd& positions() const noexcept { return positions_; }
  const Eigen::MatrixXd& distances() const noexcept { return distances_; }
  double distance(int i, int j) const { return distances_(i, j); }
  double min_distance() const;

private:
  int d_;
  Eigen::MatrixXd positions_;
  Eigen::MatrixXd distances_;
  std::uint64_t seed_;
};

/// Pairs closer than this (in units of sigma) trigger a resample.
inline constexpr double kDegenerateDistance = 1e-9;

/// Uniform i.i.d. positions in the ball of radius R: direction from normalised
/// Gaussians, radius R u^{1/d}. Deterministic in the seed.
ScattererConfig sample_config(const GasGeometry& geom, std::uint64_t seed);

enum class MatrixKind {
  M,  ///< F^{-1} delta_ij - G^+(k, r_ij) (1 - delta_ij)
  N   ///< i delta_ij - G^+(k, r_ij) / I(k, 0) (1 - delta_ij)
};

/// Dense complex symmetric multiple-scattering matrix at a given k.
struct MSMatrix {
  Eigen::MatrixXcd values;
  MatrixKind kind;
  cplx k;

  int size() const { return static_cast<int>(values.rows()); }
};

/// Builds M(k) or N(k). The model is ignored for kind N. Failures of G^+ or F^{-1}
/// are rethrown with the offending (i, j, k) appended.
MSMatrix build_matrix(MatrixKind kind, const ScattererConfig& config, const ScatteringModel& model, cplx k);

/// ln|det A| from partial-pivoting LU.
struct LogAbsDet {
  double value;   ///< -infinity when singular
  bool singular;  ///< some pivot is exactly zero
};

/// Throws OverflowError if the matrix holds non-finite entries.
LogAbsDet log_abs_det(const Eigen::MatrixXcd& a);
inline LogAbsDet log_abs_det(const MSMatrix& m) { return log_abs_det(m.values); }

struct Spectrum {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  ///< columns, unit norm; empty unless requested
};

/// All eigenvalues of a general complex matrix (Hessenberg reduction + shifted QR).
Spectrum eigen_spectrum(const Eigen::MatrixXcd& a, bool with_vectors = false);
inline Spectrum eigen_spectrum(const MSMatrix& m, bool with_vectors = false) {
  return eigen_spectrum(m.values, with_vectors);
}

struct EigenPair {
  cplx value;
  Eigen::VectorXcd vector;  ///< unit norm
  int iterations;
  double residual;          ///< ||A v - mu v|| / ||A||_F
};

/// Eigenvalue of least modulus by inverse power iteration on the LU factors,
/// finished with a few shifted (Rayleigh) steps. An exactly singular matrix
/// returns 0 with a null vector of the LU. Throws ConvergenceError.
EigenPair smallest_eigenpair(const Eigen::MatrixXcd& a);
inline EigenPair smallest_eigenpair(const MSMatrix& m) { return smallest_eigenpair(m.values); }

/// Eigenpair closest to `shift`, by shifted inverse iteration from `start`.
EigenPair nearest_eigenpair(const Eigen::MatrixXcd& a, cplx shift, const Eigen::VectorXcd& start);

struct RootOptions {
  double tol = 1e-12;          ///< stop when |mu_min| <= tol ||M||_F
  int max_iterations = 60;
  double max_step = 0.5;       ///< Newton steps are clipped to this length
  double relative_step = 1e-6; ///< finite-difference step relative to |k|
  double step_tol = 1e-13;     ///< also stop once |dk| <= step_tol max(|k|, 1)
};

struct RootResult {
  cplx k;
  cplx mu;           ///< mu_min(k) at the returned k
  double residual;   ///< |mu| / ||M||_F
  int iterations;
};

/// Newton iteration on the smallest eigenvalue of M(k) with a central-difference
/// derivative. Stops on the residual test or when the Newton correction
/// becomes negligible; the residual is reported either way. Throws ConvergenceError on non-convergence and DomainError when
/// the iterate leaves the analyticity domain.
RootResult refine_root(const ScattererConfig& config, const ScatteringModel& model, cplx k0,
                       const RootOptions& options = {});

/// Solution of M(k) a = phi for an incident plane wave, and the resulting
/// wave function outside the scatterers.
class ScatteringSolution {
public:
  ScatteringSolution(ScattererConfig config, ScatteringModel model, double k, Eigen::VectorXd direction,
                     Eigen::VectorXcd amplitudes, Eigen::VectorXcd incident);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  /// phi(x_i) = exp(i k Omega_0 . x_i)
  const Eigen::VectorXcd& incident() const noexcept { return incident_; }
  /// psi(r) = phi(r) + sum_i a_i G^+(k, |r - x_i|)
  cplx psi(const Eigen::VectorXd& r) const;

private:
  ScattererConfig config_;
  ScatteringModel model_;
  double k_;
  Eigen::VectorXd direction_;
  Eigen::VectorXcd amplitudes_;
  Eigen::VectorXcd incident_;
};

/// Throws SingularMatrixError when M(k) is singular to working precision.
ScatteringSolution scattered_amplitudes(const ScattererConfig& config, const ScatteringModel& model, double k,
                                        const Eigen::VectorXd& direction);

/// Tr[G^dagger G] for the Green matrix G_ij = G^+(k, r_ij)(1 - delta_ij).
double green_frobenius_sq(const ScattererConfig& config, cplx k);

}  // namespace lorentz
