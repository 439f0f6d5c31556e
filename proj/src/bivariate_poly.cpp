#include "roesser2d/bivariate_poly.hpp"

#include <algorithm>
#include <cmath>

namespace roesser2d {

BivariatePoly::BivariatePoly(Eigen::MatrixXd coeffs)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() == 0) coeffs_ = Eigen::MatrixXd::Zero(1, 1);
  trim();
}

BivariatePoly BivariatePoly::constant(double c) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = c;
  return BivariatePoly(m);
}

BivariatePoly BivariatePoly::variable(int axis) {
  Eigen::MatrixXd m = axis == 0 ? Eigen::MatrixXd::Zero(2, 1)
                                : Eigen::MatrixXd::Zero(1, 2);
  if (axis == 0) {
    m(1, 0) = 1.0;
  } else {
    m(0, 1) = 1.0;
  }
  return BivariatePoly(m);
}

double BivariatePoly::coefficient_threshold() const {
  return 1e-9 * (1.0 + coeffs_.cwiseAbs().maxCoeff());
}

int BivariatePoly::total_degree() const {
  const double tau = coefficient_threshold();
  int degree = -1;
  for (Eigen::Index a = 0; a < coeffs_.rows(); ++a) {
    for (Eigen::Index b = 0; b < coeffs_.cols(); ++b) {
      if (std::abs(coeffs_(a, b)) > tau) {
        degree = std::max(degree, static_cast<int>(a + b));
      }
    }
  }
  return degree;
}

std::complex<double> BivariatePoly::eval(std::complex<double> z1,
                                         std::complex<double> z2) const {
  // Horner in z1 over Horner in z2.
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index a = coeffs_.rows() - 1; a >= 0; --a) {
    std::complex<double> row(0.0, 0.0);
    for (Eigen::Index b = coeffs_.cols() - 1; b >= 0; --b) {
      row = row * z2 + coeffs_(a, b);
    }
    acc = acc * z1 + row;
  }
  return acc;
}

double BivariatePoly::eval(double z1, double z2) const {
  return eval(std::complex<double>(z1, 0.0), std::complex<double>(z2, 0.0))
      .real();
}

Eigen::VectorXcd BivariatePoly::coefficients_in_z1(
    std::complex<double> z2) const {
  Eigen::VectorXcd out(coeffs_.rows());
  for (Eigen::Index a = 0; a < coeffs_.rows(); ++a) {
    std::complex<double> row(0.0, 0.0);
    for (Eigen::Index b = coeffs_.cols() - 1; b >= 0; --b) {
      row = row * z2 + coeffs_(a, b);
    }
    out(a) = row;
  }
  return out;
}

Eigen::VectorXcd BivariatePoly::coefficients_in_z2(
    std::complex<double> z1) const {
  Eigen::VectorXcd out(coeffs_.cols());
  for (Eigen::Index b = 0; b < coeffs_.cols(); ++b) {
    std::complex<double> col(0.0, 0.0);
    for (Eigen::Index a = coeffs_.rows() - 1; a >= 0; --a) {
      col = col * z1 + coeffs_(a, b);
    }
    out(b) = col;
  }
  return out;
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& other) const {
  const Eigen::Index rows = std::max(coeffs_.rows(), other.coeffs_.rows());
  const Eigen::Index cols = std::max(coeffs_.cols(), other.coeffs_.cols());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
  sum.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
  sum.topLeftCorner(other.coeffs_.rows(), other.coeffs_.cols()) +=
      other.coeffs_;
  return BivariatePoly(sum);
}

BivariatePoly BivariatePoly::operator-(const BivariatePoly& other) const {
  return *this + other * -1.0;
}

BivariatePoly BivariatePoly::operator*(const BivariatePoly& other) const {
  Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(
      coeffs_.rows() + other.coeffs_.rows() - 1,
      coeffs_.cols() + other.coeffs_.cols() - 1);
  for (Eigen::Index a = 0; a < coeffs_.rows(); ++a) {
    for (Eigen::Index b = 0; b < coeffs_.cols(); ++b) {
      const double c = coeffs_(a, b);
      if (c == 0.0) continue;
      prod.block(a, b, other.coeffs_.rows(), other.coeffs_.cols()) +=
          c * other.coeffs_;
    }
  }
  return BivariatePoly(prod);
}

BivariatePoly BivariatePoly::operator*(double scalar) const {
  return BivariatePoly(coeffs_ * scalar);
}

double BivariatePoly::max_coefficient_distance(
    const BivariatePoly& other) const {
  const Eigen::Index rows = std::max(coeffs_.rows(), other.coeffs_.rows());
  const Eigen::Index cols = std::max(coeffs_.cols(), other.coeffs_.cols());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows, cols);
  a.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
  b.topLeftCorner(other.coeffs_.rows(), other.coeffs_.cols()) = other.coeffs_;
  return (a - b).cwiseAbs().maxCoeff();
}

void BivariatePoly::trim() {
  const double tau = coefficient_threshold();
  Eigen::Index rows = coeffs_.rows();
  Eigen::Index cols = coeffs_.cols();
  auto row_is_zero = [&](Eigen::Index r) {
    return coeffs_.row(r).cwiseAbs().maxCoeff() <= tau;
  };
  auto col_is_zero = [&](Eigen::Index c, Eigen::Index upto_rows) {
    return coeffs_.col(c).head(upto_rows).cwiseAbs().maxCoeff() <= tau;
  };
  while (rows > 1 && row_is_zero(rows - 1)) --rows;
  while (cols > 1 && col_is_zero(cols - 1, rows)) --cols;
  if (rows != coeffs_.rows() || cols != coeffs_.cols()) {
    coeffs_ = coeffs_.topLeftCorner(rows, cols).eval();
  }
  if (coeffs_.rows() == 1 && coeffs_.cols() == 1 &&
      std::abs(coeffs_(0, 0)) <= tau) {
    coeffs_(0, 0) = 0.0;
  }
}

}  // namespace roesser2d
