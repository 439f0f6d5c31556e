#include "roesser2d/model.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace roesser2d {

namespace {

void require_shape(const Eigen::MatrixXd& mat, int rows, int cols,
                   const char* name) {
  if (mat.rows() != rows || mat.cols() != cols) {
    std::ostringstream os;
    os << name << " must be " << rows << "x" << cols << ", got "
       << mat.rows() << "x" << mat.cols();
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& mat) {
  if (mat.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = kRankTolerance * sv(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) ++rank;
  }
  return rank;
}

ValidationReport validate(const Roesser2D& model) {
  const auto& d = model.dims;
  if (d.n_h < 0 || d.n_v < 0 || d.m < 0 || d.p < 0 || d.n() < 1) {
    throw DimensionMismatch("partition requires n_h, n_v >= 0, m, p >= 0 and n_h + n_v >= 1");
  }
  const int n = d.n();
  require_shape(model.E, n, n, "E");
  require_shape(model.A, n, n, "A");
  if (d.m > 0 || model.B.size() > 0) require_shape(model.B, n, d.m, "B");
  if (d.p > 0 || model.F.size() > 0) require_shape(model.F, d.p, n, "F");

  ValidationReport report;
  report.n = n;
  report.block_diagonal = true;

  // The Lyapunov split into separate h/v energies needs E to leave the
  // partition invariant; any coupling entry is rejected.
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const bool r_h = r < d.n_h;
      const bool c_h = c < d.n_h;
      if (r_h != c_h && model.E(r, c) != 0.0) {
        report.block_diagonal = false;
        std::ostringstream os;
        os << "E(" << r << "," << c << ") = " << model.E(r, c)
           << " couples horizontal and vertical states";
        report.issues.push_back({"NON_BLOCK_DIAGONAL_E", os.str()});
      }
    }
  }
  if (!model.E.allFinite() || !model.A.allFinite() || !model.B.allFinite() ||
      !model.F.allFinite()) {
    report.issues.push_back({"NON_FINITE", "model matrices must be finite"});
  }

  report.rank_E = numerical_rank(model.E);
  report.r_h = numerical_rank(model.horizontal_E());
  report.r_v = numerical_rank(model.vertical_E());
  report.valid = report.block_diagonal &&
                 report.issues.empty();
  return report;
}

void ensure_valid(const Roesser2D& model) {
  const ValidationReport report = validate(model);
  if (report.valid) return;
  std::string message = "invalid model";
  if (!report.issues.empty()) message = report.issues.front().message;
  if (!report.block_diagonal) throw NonBlockDiagonalE(message);
  throw DimensionMismatch(message);
}

namespace {

BlockDecomposition decompose_block(const Eigen::MatrixXd& block) {
  BlockDecomposition out;
  const int nb = static_cast<int>(block.rows());
  if (nb == 0) {
    out.u.resize(0, 0);
    out.v.resize(0, 0);
    out.singular_values.resize(0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  int r = 0;
  if (sigma_max > 0.0) {
    const double threshold = kRankTolerance * sigma_max;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > threshold) ++r;
    }
  }
  if (r == 0) {
    // Zero block: nothing to factor, keep the identity.
    out.u = Eigen::MatrixXd::Identity(nb, nb);
    out.v = Eigen::MatrixXd::Identity(nb, nb);
    out.singular_values.resize(0);
    return out;
  }

  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  // Deterministic sign convention: first entry of each left singular vector
  // with magnitude above tolerance made positive, V flipped in tandem.
  for (int c = 0; c < nb; ++c) {
    double lead = 0.0;
    for (int rr = 0; rr < nb; ++rr) {
      if (std::abs(u(rr, c)) > 1e-12) {
        lead = u(rr, c);
        break;
      }
    }
    if (lead < 0.0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
  out.u = u;
  out.v = v;
  out.singular_values = sv.head(r);
  out.r = r;
  return out;
}

}  // namespace

RankDecomposition rank_decompose(const Roesser2D& model) {
  ensure_valid(model);
  RankDecomposition out;
  out.h = decompose_block(model.horizontal_E());
  out.v = decompose_block(model.vertical_E());
  return out;
}

Eigen::MatrixXd effective_dynamics(const Roesser2D& model,
                                   const ClosedLoopSpec& loop) {
  const int n = model.dims.n();
  switch (loop.mode) {
    case FeedbackMode::Open:
      return model.A;
    case FeedbackMode::StateFeedback:
      if (loop.gain.rows() != model.dims.m || loop.gain.cols() != n) {
        std::ostringstream os;
        os << "state-feedback gain must be " << model.dims.m << "x" << n
           << ", got " << loop.gain.rows() << "x" << loop.gain.cols();
        throw DimensionMismatch(os.str());
      }
      return model.A + model.B * loop.gain;
    case FeedbackMode::OutputFeedback:
      if (loop.gain.rows() != model.dims.m || loop.gain.cols() != model.dims.p) {
        std::ostringstream os;
        os << "output-feedback gain must be " << model.dims.m << "x"
           << model.dims.p << ", got " << loop.gain.rows() << "x"
           << loop.gain.cols();
        throw DimensionMismatch(os.str());
      }
      return model.A - model.B * loop.gain * model.F;
  }
  throw DimensionMismatch("unknown feedback mode");
}

}  // namespace roesser2d
