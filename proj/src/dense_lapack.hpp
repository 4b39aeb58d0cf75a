#pragma once

#include <Eigen/Dense>

namespace lorentz::detail {

/// In-place LU with partial pivoting (zgetrf). Returns LAPACK info.
int lu_in_place(Eigen::MatrixXcd& a);

/// Eigenvalues (and right eigenvectors when requested) via zgeev. Returns LAPACK info.
int general_eigen(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd* vectors);

}  // namespace lorentz::detail
