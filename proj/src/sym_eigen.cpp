#include "roesser2d/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace roesser2d {

namespace {

// Two-sided Householder reduction to tridiagonal form. Sizes here are tiny,
// so the explicit rank-2 updates are applied block-wise without packing.
void tridiagonalize(Eigen::MatrixXd t, Eigen::VectorXd& diag,
                    Eigen::VectorXd& sub) {
  const Eigen::Index n = t.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd x = t.col(k).segment(k + 1, n - k - 1);
    const double xnorm = x.norm();
    if (xnorm == 0.0) continue;
    const double alpha = x(0) >= 0.0 ? -xnorm : xnorm;
    Eigen::VectorXd v = x;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm <= std::numeric_limits<double>::min()) continue;
    v /= vnorm;
    // T <- H T H with H = I - 2 v v^T on the trailing index range.
    auto rows = t.block(k + 1, 0, n - k - 1, n);
    rows -= 2.0 * v * (v.transpose() * rows).eval();
    auto cols = t.block(0, k + 1, n, n - k - 1);
    cols -= 2.0 * (cols * v).eval() * v.transpose();
  }
  diag.resize(n);
  // One sentinel slot past the last subdiagonal entry simplifies the QL
  // bookkeeping below.
  sub = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = t(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    sub(i) = 0.5 * (t(i + 1, i) + t(i, i + 1));
  }
}

// Implicit-shift QL on a symmetric tridiagonal matrix. d holds the diagonal,
// e the subdiagonal in e(0..n-2) with e(n-1) = 0; eigenvalues land in d
// unordered.
void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd& e) {
  const Eigen::Index n = d.size();
  if (n <= 1) return;
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    int iterations = 0;
    Eigen::Index m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m != l) {
        if (iterations++ == 64) {
          throw std::runtime_error("tridiagonal QL failed to converge");
        }
        double g = (d(l + 1) - d(l)) / (2.0 * e(l));
        double r = std::hypot(g, 1.0);
        g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        Eigen::Index i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e(i);
          const double b = c * e(i);
          r = std::hypot(f, g);
          e(i + 1) = r;
          if (r == 0.0) {
            d(i + 1) -= p;
            e(m) = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + 2.0 * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols()) {
    throw std::invalid_argument("sym_eigenvalues needs a square matrix");
  }
  const Eigen::Index n = mat.rows();
  Eigen::VectorXd d(n);
  if (n == 0) return d;
  if (n == 1) {
    d(0) = mat(0, 0);
    return d;
  }
  // Symmetrize first so tiny asymmetries from matrix products cannot leak
  // into the reduction.
  Eigen::MatrixXd sym = 0.5 * (mat + mat.transpose());
  Eigen::VectorXd e;
  tridiagonalize(std::move(sym), d, e);
  tridiagonal_ql(d, e);
  std::sort(d.data(), d.data() + d.size());
  return d;
}

double sym_min_eigenvalue(const Eigen::MatrixXd& mat) {
  const Eigen::VectorXd vals = sym_eigenvalues(mat);
  return vals.size() > 0 ? vals(0) : 0.0;
}

double sym_max_eigenvalue(const Eigen::MatrixXd& mat) {
  const Eigen::VectorXd vals = sym_eigenvalues(mat);
  return vals.size() > 0 ? vals(vals.size() - 1) : 0.0;
}

}  // namespace roesser2d
