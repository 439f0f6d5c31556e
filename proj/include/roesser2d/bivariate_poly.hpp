#pragma once

#include <Eigen/Dense>
#include <complex>

namespace roesser2d {

// Real-coefficient polynomial in (z1, z2). coeffs(a, b) multiplies
// z1^a * z2^b. Trailing all-zero rows/columns are trimmed; the zero
// polynomial is the 1x1 matrix [0].
class BivariatePoly {
 public:
  BivariatePoly() : coeffs_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit BivariatePoly(Eigen::MatrixXd coeffs);

  static BivariatePoly zero() { return BivariatePoly(); }
  static BivariatePoly constant(double c);
  // The monomial z1 (axis = 0) or z2 (axis = 1).
  static BivariatePoly variable(int axis);

  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  int degree_z1() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int degree_z2() const { return static_cast<int>(coeffs_.cols()) - 1; }

  // Coefficient zero threshold: 1e-9 * (1 + max |coeff|).
  double coefficient_threshold() const;
  // Largest a+b with |coeffs(a,b)| above the threshold; -1 for the zero
  // polynomial.
  int total_degree() const;
  bool is_zero() const { return total_degree() < 0; }

  std::complex<double> eval(std::complex<double> z1,
                            std::complex<double> z2) const;
  double eval(double z1, double z2) const;

  // Coefficients of z1^a as a polynomial in z2 evaluated at z2, ordered by
  // ascending a (used for the per-line root scans).
  Eigen::VectorXcd coefficients_in_z1(std::complex<double> z2) const;
  Eigen::VectorXcd coefficients_in_z2(std::complex<double> z1) const;

  BivariatePoly operator+(const BivariatePoly& other) const;
  BivariatePoly operator-(const BivariatePoly& other) const;
  BivariatePoly operator*(const BivariatePoly& other) const;
  BivariatePoly operator*(double scalar) const;

  // Largest absolute coefficient difference after size alignment.
  double max_coefficient_distance(const BivariatePoly& other) const;

 private:
  void trim();
  Eigen::MatrixXd coeffs_;
};

}  // namespace roesser2d
