#pragma once

#include <string>
#include <vector>

#include "lorentz/models.hpp"

namespace lorentz {

enum class Parity { symmetric, antisymmetric };  // G^+ = +F^{-1} / G^+ = -F^{-1}
enum class BranchMethod { exact, approx_general, approx_hard_sphere };

const char* to_string(Parity p);
const char* to_string(BranchMethod m);

/// One member of the band of two-scatterer resonances k_n s ~ n pi.
struct ResonanceBranch {
  int n;
  cplx k;
  Parity parity;
  BranchMethod method;
  double residual = 0.0;  ///< |G^+(k, s) -+ F^{-1}(k)| for exact entries
  bool converged = true;
  int iterations = 0;
  std::string note;       ///< reason when not converged
};

enum class ApproxVariant { general, hard_sphere };

/// Envelope A(k, s) = G^+(k, s) e^{-iks}.
cplx green_envelope(int d, cplx k, double s);

/// Approximate k_n for the pair at separation s. `general` uses the logarithm
/// of F^{-1}/A at k = n pi / s with its phase reduced to (-pi/2, pi/2], which
/// fixes the parity; `hard_sphere` is the small-alpha form without the e^{ik alpha}
/// phase and requires a HardSphere model. Logs a warning when |F^{-1}/A| is outside
/// [1e-6, 1e6].
cplx approx_resonance(int d, const ScatteringModel& model, double s, int n, ApproxVariant variant);

struct TwoScatterOptions {
  double tol = 1e-9;  ///< on |G^+ -+ F^{-1}|
  int max_iterations = 100;
  ApproxVariant seed = ApproxVariant::general;
};

/// Newton solutions of G^+(k, s) = +-F^{-1}(k) for n in [n_min, n_max]. Each n
/// is seeded by the approximate k_n and solved for the sign whose residual is
/// smaller at the seed; the other sign belongs to the neighbouring n. Entries
/// that fail are kept with converged = false.
std::vector<ResonanceBranch> exact_resonances(int d, const ScatteringModel& model, double s, int n_min, int n_max,
                                              const TwoScatterOptions& options = {});

/// Solves one (n, parity) pair from an explicit seed.
ResonanceBranch solve_resonance(int d, const ScatteringModel& model, double s, int n, Parity parity, cplx seed,
                                const TwoScatterOptions& options = {});

/// Gamma = 2 v |Im k|. Requires Im k < 0.
double escape_rate(cplx k, double velocity);

/// Small-alpha escape rate of band member n: (v/s)(d-1) ln(s/alpha) + (v/(s d))(alpha n pi / s)^2.
double band_escape_rate(int d, double alpha, double s, double velocity, int n);

}  // namespace lorentz
