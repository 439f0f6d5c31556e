#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "roesser2d/errors.hpp"

namespace roesser2d {

// Relative singular-value threshold used for numerical rank decisions.
inline constexpr double kRankTolerance = 1e-10;

// State partition of a 2D Roesser system: n_h horizontal states (advance in
// i), n_v vertical states (advance in j), m inputs, p outputs.
struct PartitionDims {
  int n_h = 0;
  int n_v = 0;
  int m = 0;
  int p = 0;

  int n() const { return n_h + n_v; }
};

// Singular (descriptor) 2D Roesser system
//   E [x^h(i+1,j); x^v(i,j+1)] = A x(i,j) + B u(i,j),  y = F x.
// E must be block-diagonal across the h/v partition; it may be rank
// deficient, which is what makes the model differential-algebraic.
struct Roesser2D {
  PartitionDims dims;
  Eigen::MatrixXd E;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;  // n x m, empty allowed when m = 0
  Eigen::MatrixXd F;  // p x n, empty allowed when p = 0

  Eigen::MatrixXd horizontal_E() const {
    return E.topLeftCorner(dims.n_h, dims.n_h);
  }
  Eigen::MatrixXd vertical_E() const {
    return E.bottomRightCorner(dims.n_v, dims.n_v);
  }
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  bool valid = false;
  bool block_diagonal = false;
  int n = 0;
  int rank_E = 0;
  int r_h = 0;  // rank of the horizontal E block
  int r_v = 0;  // rank of the vertical E block
  std::vector<ValidationIssue> issues;
};

// Orthogonal factorization of one E block: u^T * block * v = diag(s, 0)
// with the r leading singular values in s, sorted descending.
struct BlockDecomposition {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::VectorXd singular_values;  // length r
  int r = 0;
};

struct RankDecomposition {
  BlockDecomposition h;
  BlockDecomposition v;

  int total_rank() const { return h.r + v.r; }
};

enum class FeedbackMode { Open, StateFeedback, OutputFeedback };

// Closed-loop wiring: open (u external), u = K x, or u = -K y.
struct ClosedLoopSpec {
  FeedbackMode mode = FeedbackMode::Open;
  Eigen::MatrixXd gain;  // m x n (state) or m x p (output); unused when open

  static ClosedLoopSpec open() { return {FeedbackMode::Open, {}}; }
  static ClosedLoopSpec state_feedback(const Eigen::MatrixXd& k) {
    return {FeedbackMode::StateFeedback, k};
  }
  static ClosedLoopSpec output_feedback(const Eigen::MatrixXd& k) {
    return {FeedbackMode::OutputFeedback, k};
  }
};

// Structural validation: dimension consistency, block-diagonality of E and
// numerical ranks. Throws DimensionMismatch when matrix shapes disagree with
// dims; everything else is reported, not thrown.
ValidationReport validate(const Roesser2D& model);

// Throws unless validate(model) is clean (NonBlockDiagonalE or
// DimensionMismatch with the offending entries named).
void ensure_valid(const Roesser2D& model);

// Per-block SVD-based rank decomposition with a deterministic sign
// convention (first nonzero entry of each left singular vector positive).
// Zero blocks get identity factors and rank 0.
RankDecomposition rank_decompose(const Roesser2D& model);

// Effective dynamics matrix of the wired loop: A, A + B*K or A - B*K*F.
// Throws DimensionMismatch when the gain does not fit the mode.
Eigen::MatrixXd effective_dynamics(const Roesser2D& model,
                                   const ClosedLoopSpec& loop);

// Numerical rank with threshold kRankTolerance * sigma_max.
int numerical_rank(const Eigen::MatrixXd& mat);

}  // namespace roesser2d
