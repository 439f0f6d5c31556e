#pragma once

#include "roesser2d/bivariate_poly.hpp"
#include "roesser2d/model.hpp"

namespace roesser2d {

// Characteristic polynomial det(E * I(z1,z2) - A) with
// I(z1,z2) = diag(z1 I_{n_h}, z2 I_{n_v}), computed by
// evaluation-interpolation on a tensor grid of real nodes.
BivariatePoly char_poly(const Roesser2D& model);

// Same polynomial via cofactor expansion over exact polynomial arithmetic.
// Independent of the interpolation path; throws SizeLimit for n > 6.
BivariatePoly char_poly_oracle(const Roesser2D& model);

// det(E * I(z1,z2) - A) at a single point, by dense determinant.
std::complex<double> char_matrix_determinant(const Roesser2D& model,
                                             std::complex<double> z1,
                                             std::complex<double> z2);

}  // namespace roesser2d
