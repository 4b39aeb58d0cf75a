#include "lorentz/ensemble.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "dense_lapack.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/log.hpp"

namespace lorentz {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Portable draws: std distributions are implementation-defined.
class Draws {
public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double open_uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = open_uniform();
    const double u2 = open_uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(phase);
    has_spare_ = true;
    return rad * std::cos(phase);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Eigen::MatrixXd draw_positions(const GasGeometry& geom, Draws& draws) {
  const int d = geom.dimension();
  const int n = geom.size();
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int c = 0; c < d; ++c) {
        x(i, c) = draws.normal();
        norm2 += x(i, c) * x(i, c);
      }
    } while (norm2 == 0.0);
    const double radius = geom.radius() * std::pow(draws.open_uniform(), 1.0 / d);
    x.row(i) *= radius / std::sqrt(norm2);
  }
  return x;
}

std::string where(int i, int j, cplx k) {
  std::ostringstream os;
  os.precision(17);
  os << " [i=" << i << ", j=" << j << ", k=" << k.real() << (k.imag() < 0 ? "" : "+") << k.imag() << "i]";
  return os.str();
}

template <class Fn>
cplx checked(Fn&& fn, int i, int j, cplx k) {
  try {
    return fn();
  } catch (const PoleError& e) {
    throw PoleError(e.what() + where(i, j, k));
  } catch (const DomainError& e) {
    throw DomainError(e.what() + where(i, j, k));
  } catch (const OverflowError& e) {
    throw OverflowError(e.what() + where(i, j, k));
  }
}

bool all_finite(const Eigen::MatrixXcd& a) {
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (!std::isfinite(a(r, c).real()) || !std::isfinite(a(r, c).imag())) return false;
  return true;
}

// x with U x = 0, for the first zero pivot j of the upper factor.
Eigen::VectorXcd lu_null_vector(const Eigen::MatrixXcd& lu, Eigen::Index j) {
  const Eigen::Index n = lu.rows();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  x(j) = 1.0;
  for (Eigen::Index r = j - 1; r >= 0; --r) {
    cplx acc = lu(r, j);
    for (Eigen::Index c = r + 1; c < j; ++c) acc += lu(r, c) * x(c);
    x(r) = -acc / lu(r, r);
  }
  return x;
}

double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& v, cplx mu, double norm_a) {
  if (norm_a == 0.0) return 0.0;
  return (a * v - mu * v).norm() / norm_a;
}

// Factor-level check: exact zero pivot of the U factor, or -1.
Eigen::Index zero_pivot(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  const auto& m = lu.matrixLU();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (m(i, i) == cplx(0.0, 0.0)) return i;
  return -1;
}

constexpr double kEigenTol = 1e-12;

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix_finalize(master_seed + (index + 1) * kGolden);
}

ScattererConfig::ScattererConfig(int d, Eigen::MatrixXd positions, std::uint64_t seed)
    : d_(d), positions_(std::move(positions)), seed_(seed) {
  if (d < 1) throw DomainError("ScattererConfig: d must be >= 1");
  if (positions_.cols() != d) throw DomainError("ScattererConfig: positions must have d columns");
  const Eigen::Index n = positions_.rows();
  distances_ = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double r = (positions_.row(i) - positions_.row(j)).norm();
      distances_(i, j) = r;
      distances_(j, i) = r;
    }
}

double ScattererConfig::min_distance() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < size(); ++j)
    for (int i = j + 1; i < size(); ++i) m = std::min(m, distances_(i, j));
  return m;
}

ScattererConfig sample_config(const GasGeometry& geom, std::uint64_t seed) {
  Draws draws(seed);
  for (int attempt = 0;; ++attempt) {
    ScattererConfig config(geom.dimension(), draw_positions(geom, draws), seed);
    if (config.min_distance() >= kDegenerateDistance * geom.sigma()) return config;
    log::warn("sample_config: degenerate pair (r < 1e-9 sigma) for seed " + std::to_string(seed) +
              ", resampling");
    if (attempt > 1000) throw ConvergenceError("sample_config: could not avoid coincident points", attempt);
  }
}

MSMatrix build_matrix(MatrixKind kind, const ScattererConfig& config, const ScatteringModel& model, cplx k) {
  const int n = config.size();
  const int d = config.dimension();
  MSMatrix out{Eigen::MatrixXcd(n, n), kind, k};
  cplx diag;
  cplx scale = 1.0;
  if (kind == MatrixKind::M) {
    diag = checked([&] { return f_inverse(model, d, k); }, -1, -1, k);
  } else {
    diag = cplx(0.0, 1.0);
    const cplx i0 = checked([&] { return green_I(d, k, 0.0); }, -1, -1, k);
    scale = 1.0 / i0;
  }
  for (int j = 0; j < n; ++j) {
    out.values(j, j) = diag;
    for (int i = j + 1; i < n; ++i) {
      const double r = config.distance(i, j);
      const cplx g = checked([&] { return green_plus(d, k, r); }, i, j, k);
      const cplx e = kind == MatrixKind::M ? -g : -g * scale;
      out.values(i, j) = e;
      out.values(j, i) = e;
    }
  }
  return out;
}

LogAbsDet log_abs_det(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw DomainError("log_abs_det: matrix must be square");
  if (!all_finite(a)) throw OverflowError("log_abs_det: non-finite matrix entry");
  if (a.rows() == 0) return {0.0, false};
  Eigen::MatrixXcd m = a;
  detail::lu_in_place(m);  // info > 0 only flags the zero pivot handled below
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mag = std::abs(m(i, i));
    if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), true};
    if (!std::isfinite(mag)) throw OverflowError("log_abs_det: pivot overflow");
    sum += std::log(mag);
  }
  return {sum, false};
}

Spectrum eigen_spectrum(const Eigen::MatrixXcd& a, bool with_vectors) {
  if (a.rows() != a.cols()) throw DomainError("eigen_spectrum: matrix must be square");
  if (!all_finite(a)) throw OverflowError("eigen_spectrum: non-finite matrix entry");
  Spectrum s;
  const int info = detail::general_eigen(a, s.values, with_vectors ? &s.vectors : nullptr);
  if (info > 0) throw ConvergenceError("eigen_spectrum: QR iteration failed", static_cast<std::size_t>(30 * a.rows()));
  if (info < 0) throw DomainError("eigen_spectrum: invalid LAPACK argument");
  if (with_vectors) s.vectors.colwise().normalize();
  return s;
}

EigenPair nearest_eigenpair(const Eigen::MatrixXcd& a, cplx shift, const Eigen::VectorXcd& start) {
  const double norm_a = a.norm();
  Eigen::VectorXcd v = start.normalized();
  cplx mu = shift;
  constexpr int kMaxShifted = 30;
  for (int it = 1; it <= kMaxShifted; ++it) {
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= mu;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    const Eigen::Index zp = zero_pivot(lu);
    if (zp >= 0) {
      // mu is an eigenvalue to working precision.
      const Eigen::VectorXcd w = lu_null_vector(lu.matrixLU(), zp).normalized();
      return {mu, w, it, relative_residual(a, w, mu, norm_a)};
    }
    const Eigen::VectorXcd w = lu.solve(v);
    const cplx vw = v.dot(w);  // conj(v) . w
    if (vw == cplx(0.0, 0.0) || !std::isfinite(std::abs(vw))) break;
    mu += 1.0 / vw;
    v = w.normalized();
    const double res = relative_residual(a, v, mu, norm_a);
    if (res <= kEigenTol) return {mu, v, it, res};
  }
  const double res = relative_residual(a, v, mu, norm_a);
  if (res <= 1e-8) return {mu, v, kMaxShifted, res};
  throw ConvergenceError("nearest_eigenpair: shifted inverse iteration did not converge", kMaxShifted);
}

EigenPair smallest_eigenpair(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DomainError("smallest_eigenpair: matrix must be square");
  if (!all_finite(a)) throw OverflowError("smallest_eigenpair: non-finite matrix entry");
  const Eigen::Index n = a.rows();
  const double norm_a = a.norm();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::Index zp = zero_pivot(lu);
  if (zp >= 0) {
    // PA = LU, so U x = 0 gives A x = 0.
    Eigen::VectorXcd x = lu_null_vector(lu.matrixLU(), zp).normalized();
    return {cplx(0.0, 0.0), x, 0, relative_residual(a, x, 0.0, norm_a)};
  }

  // Deterministic start with no special symmetry.
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.37 * std::sin(1.0 + i), 0.21 * std::cos(2.0 * i));
  v.normalize();

  constexpr int kMaxPlain = 500;
  cplx mu = 0.0;
  cplx previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= kMaxPlain; ++it) {
    const Eigen::VectorXcd w = lu.solve(v);
    const cplx vw = v.dot(w);
    mu = 1.0 / vw;
    v = w.normalized();
    const double res = relative_residual(a, v, mu, norm_a);
    if (res <= kEigenTol) return {mu, v, it, res};
    // Once the estimate settles, polish with shifted steps.
    if (it >= 3 && std::abs(mu - previous) <= 1e-3 * std::abs(mu)) {
      try {
        EigenPair p = nearest_eigenpair(a, mu, v);
        p.iterations += it;
        return p;
      } catch (const ConvergenceError&) {
      }
    }
    previous = mu;
  }
  const double res = relative_residual(a, v, mu, norm_a);
  if (res <= 1e-8) return {mu, v, kMaxPlain, res};
  throw ConvergenceError("smallest_eigenpair: inverse iteration did not converge", kMaxPlain);
}

RootResult refine_root(const ScattererConfig& config, const ScatteringModel& model, cplx k0,
                       const RootOptions& options) {
  auto build = [&](cplx k) {
    try {
      return build_matrix(MatrixKind::M, config, model, k).values;
    } catch (const DomainError& e) {
      throw DomainError(std::string("refine_root: left the analyticity domain: ") + e.what());
    } catch (const PoleError& e) {
      throw DomainError(std::string("refine_root: hit an amplitude pole: ") + e.what());
    }
  };

  cplx k = k0;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXcd m = build(k);
    const EigenPair here = smallest_eigenpair(m);
    const double norm_m = m.norm();
    const double residual = std::abs(here.value) / norm_m;
    if (residual <= options.tol) return {k, here.value, residual, it};
    if (it == options.max_iterations) break;

    // Follow the same eigenvalue branch at k +- h along both axes.
    const double h = options.relative_step * std::max(std::abs(k), 1.0);
    auto mu_at = [&](cplx kk) { return nearest_eigenpair(build(kk), here.value, here.vector).value; };
    const cplx d_re = (mu_at(k + h) - mu_at(k - h)) / (2.0 * h);
    const cplx d_im = (mu_at(k + cplx(0.0, h)) - mu_at(k - cplx(0.0, h))) / cplx(0.0, 2.0 * h);
    const cplx deriv = 0.5 * (d_re + d_im);
    if (deriv == cplx(0.0, 0.0) || !std::isfinite(std::abs(deriv)))
      throw ConvergenceError("refine_root: vanishing derivative", it);
    cplx step = here.value / deriv;
    if (std::abs(step) > options.max_step) step *= options.max_step / std::abs(step);
    k -= step;
    // Newton has converged to rounding when the correction is at ulp level;
    // needed when ||M|| is dominated by mu itself (N = 1).
    if (std::abs(step) <= options.step_tol * std::max(std::abs(k), 1.0)) {
      const Eigen::MatrixXcd mk = build(k);
      const EigenPair p = smallest_eigenpair(mk);
      return {k, p.value, std::abs(p.value) / mk.norm(), it + 1};
    }
  }
  throw ConvergenceError("refine_root: Newton iteration did not converge", options.max_iterations);
}

ScatteringSolution::ScatteringSolution(ScattererConfig config, ScatteringModel model, double k,
                                       Eigen::VectorXd direction, Eigen::VectorXcd amplitudes,
                                       Eigen::VectorXcd incident)
    : config_(std::move(config)),
      model_(std::move(model)),
      k_(k),
      direction_(std::move(direction)),
      amplitudes_(std::move(amplitudes)),
      incident_(std::move(incident)) {}

cplx ScatteringSolution::psi(const Eigen::VectorXd& r) const {
  if (r.size() != config_.dimension()) throw DomainError("psi: position has wrong dimension");
  cplx value = std::exp(cplx(0.0, k_ * direction_.dot(r)));
  for (int i = 0; i < config_.size(); ++i) {
    const double dist = (r.transpose() - config_.positions().row(i)).norm();
    if (dist == 0.0) throw DomainError("psi: evaluation point coincides with a scatterer");
    value += amplitudes_(i) * green_plus(config_.dimension(), k_, dist);
  }
  return value;
}

ScatteringSolution scattered_amplitudes(const ScattererConfig& config, const ScatteringModel& model, double k,
                                        const Eigen::VectorXd& direction) {
  const int d = config.dimension();
  if (direction.size() != d) throw DomainError("scattered_amplitudes: direction has wrong dimension");
  const double dn = direction.norm();
  if (!(std::abs(dn - 1.0) <= 1e-12)) throw DomainError("scattered_amplitudes: direction must be a unit vector");
  const MSMatrix m = build_matrix(MatrixKind::M, config, model, k);
  Eigen::VectorXcd phi(config.size());
  for (int i = 0; i < config.size(); ++i)
    phi(i) = std::exp(cplx(0.0, k * direction.dot(config.positions().row(i).transpose())));
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m.values);
  if (zero_pivot(lu) >= 0 || !(lu.rcond() > 1e-14))
    throw SingularMatrixError("scattered_amplitudes: M(k) is singular (on resonance)");
  Eigen::VectorXcd a = lu.solve(phi);
  return ScatteringSolution(config, model, k, direction, std::move(a), std::move(phi));
}

double green_frobenius_sq(const ScattererConfig& config, cplx k) {
  double sum = 0.0;
  for (int j = 0; j < config.size(); ++j)
    for (int i = j + 1; i < config.size(); ++i) sum += 2.0 * std::norm(green_plus(config.dimension(), k, config.distance(i, j)));
  return sum;
}

}  // namespace lorentz
