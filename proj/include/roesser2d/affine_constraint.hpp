#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace roesser2d {

enum class ConstraintSense {
  NegDef,  // G(y) <= -epsilon * I
  Psd,     // G(y) >= 0 (eigenvalues >= -1e-9 tolerated)
};

// Affine symmetric-matrix constraint G(y) = g0 + sum_i y_i * coeff[i].
struct AffineMatrixConstraint {
  Eigen::MatrixXd g0;
  std::vector<Eigen::MatrixXd> coeff;  // one per decision coordinate
  ConstraintSense sense = ConstraintSense::NegDef;
  std::string label;

  Eigen::Index dimension() const { return g0.rows(); }

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd g = g0;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      const double yi = y(static_cast<Eigen::Index>(i));
      if (yi != 0.0) g += yi * coeff[i];
    }
    return g;
  }
};

inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-12;

}  // namespace roesser2d
