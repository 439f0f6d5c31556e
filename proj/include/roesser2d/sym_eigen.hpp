#pragma once

#include <Eigen/Dense>

namespace roesser2d {

// Eigenvalues of a symmetric matrix, ascending, via Householder
// tridiagonalization and implicit-shift QL. Kept separate from Eigen's
// solvers so certificate verification does not share a code path with the
// optimizer that produced the certificate.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& mat);

double sym_min_eigenvalue(const Eigen::MatrixXd& mat);
double sym_max_eigenvalue(const Eigen::MatrixXd& mat);

}  // namespace roesser2d
