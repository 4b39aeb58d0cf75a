#include "lorentz/twoscat.hpp"

#include <cmath>
#include <sstream>

#include "lorentz/errors.hpp"
#include "lorentz/log.hpp"

namespace lorentz {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

double sign_of(Parity p) { return p == Parity::symmetric ? 1.0 : -1.0; }

cplx residual_fn(int d, const ScatteringModel& model, double s, Parity parity, cplx k) {
  return green_plus(d, k, s) - sign_of(parity) * f_inverse(model, d, k);
}

}  // namespace

const char* to_string(Parity p) { return p == Parity::symmetric ? "symmetric" : "antisymmetric"; }

const char* to_string(BranchMethod m) {
  switch (m) {
    case BranchMethod::exact: return "exact";
    case BranchMethod::approx_general: return "approx_general";
    case BranchMethod::approx_hard_sphere: return "approx_hs";
  }
  return "unknown";
}

cplx green_envelope(int d, cplx k, double s) { return green_plus(d, k, s) * std::exp(-kI * k * s); }

cplx approx_resonance(int d, const ScatteringModel& model, double s, int n, ApproxVariant variant) {
  if (!(s > 0.0)) throw DomainError("approx_resonance: s must be positive");
  if (n < 1) throw DomainError("approx_resonance: n must be >= 1");
  const double k0 = n * kPi / s;
  cplx ratio;
  try {
    ratio = f_inverse(model, d, k0) / green_envelope(d, k0, s);
  } catch (const PoleError&) {
    ratio = cplx(std::numeric_limits<double>::infinity(), 0.0);
  }
  const double mag = std::abs(ratio);
  if (!(mag >= 1e-6 && mag <= 1e6)) {
    std::ostringstream msg;
    msg << "approx_resonance: |F^{-1}/A| = " << mag << " at n=" << n << " is outside [1e-6, 1e6]";
    log::warn(msg.str());
  }
  if (variant == ApproxVariant::general) {
    if (!std::isfinite(mag) || mag == 0.0) throw DomainError("approx_resonance: F^{-1}/A is zero or infinite");
    // Reduce the phase to (-pi/2, pi/2] so Re k_n s stays within pi/2 of n pi.
    const double phase = std::arg(ratio);
    const double reduced = phase - kPi * std::round(phase / kPi);
    return (n * kPi + reduced - kI * std::log(mag)) / s;
  }
  if (!model.is_hard_sphere()) throw DomainError("approx_resonance: hard_sphere variant needs a HardSphere model");
  const double alpha = model.as_hard_sphere().alpha;
  const double q = alpha * n * kPi / s;
  return (n * kPi - kI * (0.5 * (d - 1) * std::log(s / alpha)) - kI * (q * q / (2.0 * d))) / s;
}

ResonanceBranch solve_resonance(int d, const ScatteringModel& model, double s, int n, Parity parity, cplx seed,
                                const TwoScatterOptions& options) {
  ResonanceBranch out{n, seed, parity, BranchMethod::exact, 0.0, true, 0, {}};
  cplx k = seed;
  try {
    cplx f = residual_fn(d, model, s, parity, k);
    for (int it = 0; it < options.max_iterations; ++it) {
      out.k = k;
      out.residual = std::abs(f);
      out.iterations = it;
      if (out.residual <= options.tol) return out;
      const double h = 1e-6 * std::max(std::abs(k), 1.0) / s;
      const cplx df = (residual_fn(d, model, s, parity, k + h) - residual_fn(d, model, s, parity, k - h)) / (2.0 * h);
      if (df == cplx(0.0, 0.0) || !std::isfinite(std::abs(df))) break;
      cplx step = f / df;
      // Steps longer than half the band spacing jump between members.
      const double cap = 0.5 * kPi / s;
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      k -= step;
      f = residual_fn(d, model, s, parity, k);
    }
    out.k = k;
    out.residual = std::abs(f);
    out.iterations = options.max_iterations;
    if (out.residual <= options.tol) return out;
    out.note = "no convergence";
  } catch (const std::exception& e) {
    out.note = e.what();
  }
  out.converged = false;
  return out;
}

std::vector<ResonanceBranch> exact_resonances(int d, const ScatteringModel& model, double s, int n_min, int n_max,
                                              const TwoScatterOptions& options) {
  if (!(s > 0.0)) throw DomainError("exact_resonances: s must be positive");
  if (n_min < 1 || n_max < n_min) throw DomainError("exact_resonances: need 1 <= n_min <= n_max");
  std::vector<ResonanceBranch> out;
  for (int n = n_min; n <= n_max; ++n) {
    cplx seed;
    try {
      seed = approx_resonance(d, model, s, n, options.seed);
    } catch (const DomainError&) {
      // F^{-1} has a pole at n pi / s; only the hard-sphere form is still defined.
      if (!model.is_hard_sphere()) throw;
      seed = approx_resonance(d, model, s, n, ApproxVariant::hard_sphere);
    }
    double rs = std::numeric_limits<double>::infinity(), ra = rs;
    try {
      rs = std::abs(residual_fn(d, model, s, Parity::symmetric, seed));
      ra = std::abs(residual_fn(d, model, s, Parity::antisymmetric, seed));
    } catch (const std::exception&) {
    }
    const Parity parity = rs <= ra ? Parity::symmetric : Parity::antisymmetric;
    ResonanceBranch b = solve_resonance(d, model, s, n, parity, seed, options);
    if (!b.converged) {
      std::ostringstream msg;
      msg << "exact_resonances: n=" << n << " sign=" << to_string(parity) << " failed: " << b.note;
      log::warn(msg.str());
    }
    out.push_back(std::move(b));
  }
  return out;
}

double escape_rate(cplx k, double velocity) {
  if (!(k.imag() < 0.0)) throw DomainError("escape_rate: Im k must be negative");
  return 2.0 * velocity * std::abs(k.imag());
}

double band_escape_rate(int d, double alpha, double s, double velocity, int n) {
  if (!(alpha > 0.0) || !(s > 0.0)) throw DomainError("band_escape_rate: alpha and s must be positive");
  const double q = alpha * n * kPi / s;
  return (velocity / s) * (d - 1) * std::log(s / alpha) + (velocity / (s * d)) * q * q;
}

}  // namespace lorentz
