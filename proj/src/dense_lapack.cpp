#include "dense_lapack.hpp"

#include <complex>
#include <mutex>
#include <vector>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace lorentz::detail {

namespace {

// Parallelism lives at the ensemble level; BLAS threading would also make
// results depend on the machine.
void single_threaded_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

lapack_complex_double* raw(Eigen::MatrixXcd& m) { return reinterpret_cast<lapack_complex_double*>(m.data()); }

}  // namespace

int lu_in_place(Eigen::MatrixXcd& a) {
  single_threaded_blas();
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<lapack_int> pivots(n);
  return LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, raw(a), n, pivots.data());
}

int general_eigen(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd* vectors) {
  single_threaded_blas();
  const lapack_int n = static_cast<lapack_int>(a.rows());
  values.resize(n);
  auto* w = reinterpret_cast<lapack_complex_double*>(values.data());
  if (vectors) {
    vectors->resize(n, n);
    return LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, raw(a), n, w, nullptr, 1, raw(*vectors), n);
  }
  return LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, raw(a), n, w, nullptr, 1, nullptr, 1);
}

}  // namespace lorentz::detail
