#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roesser2d/affine_constraint.hpp"
#include "roesser2d/model.hpp"
#include "roesser2d/sdp.hpp"

namespace roesser2d {

// The block condition appears in three documented forms:
//  - Faithful:        [[-E^T P E, A^T P], [P A,  P]] <= -eps I, as printed
//                     in the source conditions;
//  - SignCorrected:   same with (2,2) block -P, plus P >= eps_P I, which is
//                     what the congruence derivation actually yields;
//  - DeltaDirect:     A^T P A - E^T P E <= -eps I with P sign-unrestricted,
//                     the Lyapunov difference itself.
// All three keep E^T P E >= 0.
enum class LmiVariant { Faithful, SignCorrected, DeltaDirect };

enum class LmiKind { Stability, StateFeedback, OutputFeedback };

const char* to_string(LmiVariant variant);
const char* to_string(LmiKind kind);

// Strict-inequality margin for a given model: 1e-6 * (1 + ||A||_2 + ||E||_2).
double strictness_epsilon(const Eigen::MatrixXd& e, const Eigen::MatrixXd& a);

inline constexpr double kPositivityEpsilon = 1e-6;  // eps_P for SignCorrected

// Packing of the decision vector: upper triangles of P_h and P_v row-major,
// then the full extra matrix (Z for state feedback, X for output feedback)
// row-major.
class VariableLayout {
 public:
  enum class Extra { None, Z, X };

  VariableLayout(int n_h, int n_v, Extra extra = Extra::None, int p = 0);

  int dimension() const { return dim_; }
  int n() const { return n_h_ + n_v_; }
  int n_h() const { return n_h_; }
  int n_v() const { return n_v_; }
  Extra extra() const { return extra_; }
  int extra_rows() const;
  int extra_cols() const;

  Eigen::VectorXd pack(const Eigen::MatrixXd& p_h, const Eigen::MatrixXd& p_v,
                       const Eigen::MatrixXd& extra = {}) const;
  void unpack(const Eigen::VectorXd& y, Eigen::MatrixXd& p_h,
              Eigen::MatrixXd& p_v, Eigen::MatrixXd& extra) const;

  // Value of P = diag(P_h, P_v) as an n x n matrix for coordinate i; zero
  // matrix for extra coordinates.
  Eigen::MatrixXd p_basis(int i) const;
  // Value of the extra matrix for coordinate i; zero for P coordinates.
  Eigen::MatrixXd extra_basis(int i) const;

 private:
  int n_h_;
  int n_v_;
  Extra extra_;
  int p_;
  int dim_;
};

struct LmiProblem {
  LmiKind kind = LmiKind::Stability;
  LmiVariant variant = LmiVariant::Faithful;
  VariableLayout layout{0, 0};
  std::vector<AffineMatrixConstraint> constraints;
  double epsilon = 0.0;
  Eigen::MatrixXd E;  // kept for the structural precheck
};

struct StructuralInfeasibility {
  Eigen::VectorXd null_direction;  // v in null(E)
  std::string message;
};

// Stability test in the requested variant.
LmiProblem build_stability(const Roesser2D& model, LmiVariant variant);

// Feedback synthesis conditions. DeltaDirect is bilinear in (P, K) and is
// rejected with VariantUnsupported.
LmiProblem build_state_feedback(const Roesser2D& model, LmiVariant variant);
LmiProblem build_output_feedback(const Roesser2D& model, LmiVariant variant);

// For rank-deficient E the (1,1) block of the Faithful/SignCorrected forms
// is zero along null(E), so the block matrix can never be pushed below
// -eps I, independent of the decision variables.
std::optional<StructuralInfeasibility> structural_precheck(
    const LmiProblem& problem);

// Lyapunov difference x^T (A_eff^T P A_eff - E^T P E) x.
double lyapunov_delta(const Eigen::MatrixXd& e, const Eigen::MatrixXd& a_eff,
                      const Eigen::MatrixXd& p, const Eigen::VectorXd& x);

struct Certificate {
  Eigen::MatrixXd p_h;
  Eigen::MatrixXd p_v;
  std::optional<Eigen::MatrixXd> extra;  // Z or X when synthesizing
  double margin = 0.0;   // min over NegDef constraints of -lambda_max
  double psd_min = 0.0;  // min over Psd constraints of lambda_min
  LmiVariant variant = LmiVariant::Faithful;

  Eigen::MatrixXd p() const;
};

// Margins of a candidate certificate under the independent eigenvalue
// routine (same quantities the solver verification uses).
sdp::MarginReport evaluate_certificate(const LmiProblem& problem,
                                       const Certificate& certificate);

// Checker for externally supplied stability certificates: every NegDef
// eigenvalue <= -1e-9 and every Psd eigenvalue >= -1e-9.
struct CertificateCheck {
  bool pass = false;
  double neg_max_eigenvalue = 0.0;
  double psd_min_eigenvalue = 0.0;
};

CertificateCheck check_stability_certificate(const Roesser2D& model,
                                             LmiVariant variant,
                                             const Eigen::MatrixXd& p_h,
                                             const Eigen::MatrixXd& p_v);

// End-to-end stability certification: precheck (unless forced past it),
// solve, package. The precheck finding is reported alongside the solver
// outcome when force_solve is set.
struct CertifyResult {
  LmiProblem problem;
  std::optional<StructuralInfeasibility> precheck;
  sdp::SolveOutcome outcome;
  std::optional<Certificate> certificate;
  bool solver_ran = false;
};

CertifyResult certify_stability(const Roesser2D& model, LmiVariant variant,
                                const sdp::SolveOptions& options = {},
                                bool force_solve = false);

Certificate make_certificate(const LmiProblem& problem,
                             const Eigen::VectorXd& y);

}  // namespace roesser2d
