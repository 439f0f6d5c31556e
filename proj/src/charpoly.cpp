#include "roesser2d/charpoly.hpp"

#include <Eigen/LU>
#include <vector>

namespace roesser2d {

namespace {

// Characteristic matrix E * I(z1,z2) - A: column c of E scales with z1 when
// c indexes a horizontal state and with z2 otherwise.
Eigen::MatrixXcd char_matrix(const Roesser2D& model, std::complex<double> z1,
                             std::complex<double> z2) {
  const int n = model.dims.n();
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::complex<double> z = c < model.dims.n_h ? z1 : z2;
      m(r, c) = model.E(r, c) * z - model.A(r, c);
    }
  }
  return m;
}

std::vector<double> interpolation_nodes(int count, double scale) {
  std::vector<double> nodes(count);
  for (int k = 0; k < count; ++k) {
    nodes[k] = (static_cast<double>(k) - 0.5 * (count - 1)) * scale;
  }
  return nodes;
}

Eigen::MatrixXd vandermonde(const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd v(n, n);
  for (int r = 0; r < n; ++r) {
    double power = 1.0;
    for (int c = 0; c < n; ++c) {
      v(r, c) = power;
      power *= nodes[r];
    }
  }
  return v;
}

}  // namespace

std::complex<double> char_matrix_determinant(const Roesser2D& model,
                                             std::complex<double> z1,
                                             std::complex<double> z2) {
  return char_matrix(model, z1, z2).determinant();
}

BivariatePoly char_poly(const Roesser2D& model) {
  ensure_valid(model);
  const int d1 = model.dims.n_h;
  const int d2 = model.dims.n_v;
  // Node spacing conditioned on the data magnitude keeps both Vandermonde
  // solves well behaved at test sizes.
  const double scale =
      1.0 + (model.A.size() > 0
                 ? model.A.cwiseAbs().rowwise().sum().maxCoeff()
                 : 0.0);
  const std::vector<double> nodes1 = interpolation_nodes(d1 + 1, scale);
  const std::vector<double> nodes2 = interpolation_nodes(d2 + 1, scale);

  Eigen::MatrixXd values(d1 + 1, d2 + 1);
  for (int a = 0; a <= d1; ++a) {
    for (int b = 0; b <= d2; ++b) {
      values(a, b) =
          char_matrix_determinant(model, nodes1[a], nodes2[b]).real();
    }
  }

  // values = V1 * C * V2^T, solve for the coefficient matrix C.
  const Eigen::MatrixXd v1 = vandermonde(nodes1);
  const Eigen::MatrixXd v2 = vandermonde(nodes2);
  Eigen::MatrixXd c = v1.partialPivLu().solve(values);
  c = v2.partialPivLu().solve(c.transpose()).transpose();
  return BivariatePoly(c);
}

namespace {

BivariatePoly poly_det(const std::vector<std::vector<BivariatePoly>>& m,
                       std::vector<int>& cols, int row) {
  const int n = static_cast<int>(m.size());
  if (row == n) return BivariatePoly::constant(1.0);
  BivariatePoly det = BivariatePoly::zero();
  double sign = 1.0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const int col = cols[k];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
    det = det + m[row][col] * poly_det(m, cols, row + 1) * sign;
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), col);
    sign = -sign;
  }
  return det;
}

}  // namespace

BivariatePoly char_poly_oracle(const Roesser2D& model) {
  ensure_valid(model);
  const int n = model.dims.n();
  if (n > 6) {
    throw SizeLimit("exact cofactor expansion supports n <= 6");
  }
  std::vector<std::vector<BivariatePoly>> entries(
      n, std::vector<BivariatePoly>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const BivariatePoly z = BivariatePoly::variable(c < model.dims.n_h ? 0 : 1);
      entries[r][c] =
          z * model.E(r, c) - BivariatePoly::constant(model.A(r, c));
    }
  }
  std::vector<int> cols(n);
  for (int c = 0; c < n; ++c) cols[c] = c;
  return poly_det(entries, cols, 0);
}

}  // namespace roesser2d
