#include "roesser2d/lmi.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "roesser2d/sym_eigen.hpp"

namespace roesser2d {

const char* to_string(LmiVariant variant) {
  switch (variant) {
    case LmiVariant::Faithful: return "faithful";
    case LmiVariant::SignCorrected: return "sign-corrected";
    case LmiVariant::DeltaDirect: return "eq12";
  }
  return "?";
}

const char* to_string(LmiKind kind) {
  switch (kind) {
    case LmiKind::Stability: return "stability";
    case LmiKind::StateFeedback: return "state-feedback";
    case LmiKind::OutputFeedback: return "output-feedback";
  }
  return "?";
}

double strictness_epsilon(const Eigen::MatrixXd& e, const Eigen::MatrixXd& a) {
  const double norm_e =
      e.size() > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()(0)
                   : 0.0;
  const double norm_a =
      a.size() > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0)
                   : 0.0;
  return 1e-6 * (1.0 + norm_a + norm_e);
}

namespace {

int triangle(int n) { return n * (n + 1) / 2; }

}  // namespace

VariableLayout::VariableLayout(int n_h, int n_v, Extra extra, int p)
    : n_h_(n_h), n_v_(n_v), extra_(extra), p_(p) {
  dim_ = triangle(n_h_) + triangle(n_v_) + extra_rows() * extra_cols();
}

int VariableLayout::extra_rows() const {
  switch (extra_) {
    case Extra::None: return 0;
    case Extra::Z: return n();
    case Extra::X: return p_;
  }
  return 0;
}

int VariableLayout::extra_cols() const {
  return extra_ == Extra::None ? 0 : n();
}

Eigen::VectorXd VariableLayout::pack(const Eigen::MatrixXd& p_h,
                                     const Eigen::MatrixXd& p_v,
                                     const Eigen::MatrixXd& extra_in) const {
  const Eigen::MatrixXd extra =
      extra_in.size() == 0 ? Eigen::MatrixXd::Zero(extra_rows(), extra_cols())
                           : extra_in;
  Eigen::VectorXd y(dim_);
  int idx = 0;
  for (int r = 0; r < n_h_; ++r) {
    for (int c = r; c < n_h_; ++c) y(idx++) = p_h(r, c);
  }
  for (int r = 0; r < n_v_; ++r) {
    for (int c = r; c < n_v_; ++c) y(idx++) = p_v(r, c);
  }
  for (int r = 0; r < extra_rows(); ++r) {
    for (int c = 0; c < extra_cols(); ++c) y(idx++) = extra(r, c);
  }
  return y;
}

void VariableLayout::unpack(const Eigen::VectorXd& y, Eigen::MatrixXd& p_h,
                            Eigen::MatrixXd& p_v,
                            Eigen::MatrixXd& extra) const {
  p_h = Eigen::MatrixXd::Zero(n_h_, n_h_);
  p_v = Eigen::MatrixXd::Zero(n_v_, n_v_);
  extra = Eigen::MatrixXd::Zero(extra_rows(), extra_cols());
  int idx = 0;
  for (int r = 0; r < n_h_; ++r) {
    for (int c = r; c < n_h_; ++c) {
      p_h(r, c) = y(idx);
      p_h(c, r) = y(idx);
      ++idx;
    }
  }
  for (int r = 0; r < n_v_; ++r) {
    for (int c = r; c < n_v_; ++c) {
      p_v(r, c) = y(idx);
      p_v(c, r) = y(idx);
      ++idx;
    }
  }
  for (int r = 0; r < extra_rows(); ++r) {
    for (int c = 0; c < extra_cols(); ++c) extra(r, c) = y(idx++);
  }
}

Eigen::MatrixXd VariableLayout::p_basis(int i) const {
  const int nn = n();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(nn, nn);
  int idx = 0;
  for (int r = 0; r < n_h_; ++r) {
    for (int c = r; c < n_h_; ++c) {
      if (idx == i) {
        p(r, c) = 1.0;
        p(c, r) = 1.0;
        return p;
      }
      ++idx;
    }
  }
  for (int r = 0; r < n_v_; ++r) {
    for (int c = r; c < n_v_; ++c) {
      if (idx == i) {
        p(n_h_ + r, n_h_ + c) = 1.0;
        p(n_h_ + c, n_h_ + r) = 1.0;
        return p;
      }
      ++idx;
    }
  }
  return p;
}

Eigen::MatrixXd VariableLayout::extra_basis(int i) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(extra_rows(), extra_cols());
  const int offset = triangle(n_h_) + triangle(n_v_);
  const int local = i - offset;
  if (local >= 0 && local < extra_rows() * extra_cols()) {
    m(local / extra_cols(), local % extra_cols()) = 1.0;
  }
  return m;
}

namespace {

// Shared assembly for the three problem kinds. The coupling block is
// A^T P (stability), A^T P + Z (state feedback) or A^T P - F^T X (output
// feedback); each is affine in the packed coordinates.
LmiProblem build_problem(const Roesser2D& model, LmiVariant variant,
                         LmiKind kind) {
  ensure_valid(model);
  const int n = model.dims.n();

  VariableLayout::Extra extra = VariableLayout::Extra::None;
  if (kind == LmiKind::StateFeedback) extra = VariableLayout::Extra::Z;
  if (kind == LmiKind::OutputFeedback) extra = VariableLayout::Extra::X;
  const VariableLayout layout(model.dims.n_h, model.dims.n_v, extra,
                              model.dims.p);

  LmiProblem problem;
  problem.kind = kind;
  problem.variant = variant;
  problem.layout = layout;
  problem.epsilon = strictness_epsilon(model.E, model.A);
  problem.E = model.E;

  const int dim = layout.dimension();
  const Eigen::MatrixXd zero_n = Eigen::MatrixXd::Zero(n, n);

  auto coupling_for = [&](const Eigen::MatrixXd& p_i,
                          const Eigen::MatrixXd& extra_i) -> Eigen::MatrixXd {
    Eigen::MatrixXd c = model.A.transpose() * p_i;
    if (kind == LmiKind::StateFeedback && extra_i.size() > 0) {
      c += extra_i;
    } else if (kind == LmiKind::OutputFeedback && extra_i.size() > 0) {
      c -= model.F.transpose() * extra_i;
    }
    return c;
  };

  if (variant == LmiVariant::DeltaDirect) {
    AffineMatrixConstraint delta;
    delta.sense = ConstraintSense::NegDef;
    delta.label = "A^T P A - E^T P E";
    delta.g0 = zero_n;
    delta.coeff.reserve(dim);
    for (int i = 0; i < dim; ++i) {
      const Eigen::MatrixXd p_i = layout.p_basis(i);
      delta.coeff.push_back(model.A.transpose() * p_i * model.A -
                            model.E.transpose() * p_i * model.E);
    }
    problem.constraints.push_back(std::move(delta));
  } else {
    AffineMatrixConstraint block;
    block.sense = ConstraintSense::NegDef;
    block.label = "[[-E^T P E, coupling], [*, (2,2) P block]]";
    block.g0 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.coeff.reserve(dim);
    const double lower_sign =
        variant == LmiVariant::SignCorrected ? -1.0 : 1.0;
    for (int i = 0; i < dim; ++i) {
      const Eigen::MatrixXd p_i = layout.p_basis(i);
      const Eigen::MatrixXd x_i = layout.extra_basis(i);
      const Eigen::MatrixXd coupling = coupling_for(p_i, x_i);
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      g.topLeftCorner(n, n) = -model.E.transpose() * p_i * model.E;
      g.topRightCorner(n, n) = coupling;
      g.bottomLeftCorner(n, n) = coupling.transpose();
      g.bottomRightCorner(n, n) = lower_sign * p_i;
      block.coeff.push_back(std::move(g));
    }
    problem.constraints.push_back(std::move(block));
  }

  AffineMatrixConstraint gram;
  gram.sense = ConstraintSense::Psd;
  gram.label = "E^T P E";
  gram.g0 = zero_n;
  gram.coeff.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    const Eigen::MatrixXd p_i = layout.p_basis(i);
    gram.coeff.push_back(model.E.transpose() * p_i * model.E);
  }
  problem.constraints.push_back(std::move(gram));

  if (variant == LmiVariant::SignCorrected) {
    AffineMatrixConstraint positivity;
    positivity.sense = ConstraintSense::Psd;
    positivity.label = "P - eps_P I";
    positivity.g0 = -kPositivityEpsilon * Eigen::MatrixXd::Identity(n, n);
    positivity.coeff.reserve(dim);
    for (int i = 0; i < dim; ++i) positivity.coeff.push_back(layout.p_basis(i));
    problem.constraints.push_back(std::move(positivity));
  }

  return problem;
}

}  // namespace

LmiProblem build_stability(const Roesser2D& model, LmiVariant variant) {
  return build_problem(model, variant, LmiKind::Stability);
}

LmiProblem build_state_feedback(const Roesser2D& model, LmiVariant variant) {
  if (model.dims.m < 1) {
    throw NoActuation("state feedback needs at least one input (m >= 1)");
  }
  if (variant == LmiVariant::DeltaDirect) {
    throw VariantUnsupported(
        "the Lyapunov-difference form is bilinear in (P, K); use faithful "
        "or sign-corrected for synthesis");
  }
  return build_problem(model, variant, LmiKind::StateFeedback);
}

LmiProblem build_output_feedback(const Roesser2D& model, LmiVariant variant) {
  if (model.dims.m < 1) {
    throw NoActuation("output feedback needs at least one input (m >= 1)");
  }
  if (model.dims.p < 1) {
    throw NoMeasurement("output feedback needs at least one output (p >= 1)");
  }
  if (variant == LmiVariant::DeltaDirect) {
    throw VariantUnsupported(
        "the Lyapunov-difference form is bilinear in (P, K); use faithful "
        "or sign-corrected for synthesis");
  }
  return build_problem(model, variant, LmiKind::OutputFeedback);
}

std::optional<StructuralInfeasibility> structural_precheck(
    const LmiProblem& problem) {
  if (problem.variant == LmiVariant::DeltaDirect) return std::nullopt;
  const Eigen::MatrixXd& e = problem.E;
  const int n = static_cast<int>(e.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = kRankTolerance * sigma_max;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) ++rank;
  }
  if (rank >= n) return std::nullopt;

  StructuralInfeasibility finding;
  finding.null_direction = svd.matrixV().col(n - 1);
  // Deterministic orientation.
  for (Eigen::Index k = 0; k < finding.null_direction.size(); ++k) {
    if (std::abs(finding.null_direction(k)) > 1e-12) {
      if (finding.null_direction(k) < 0.0) {
        finding.null_direction = -finding.null_direction;
      }
      break;
    }
  }
  std::ostringstream os;
  os << "rank(E) = " << rank << " < " << n
     << ": for v in null(E) the (1,1) block satisfies v^T (-E^T P E) v = 0 "
        "for every P, so the block matrix cannot be pushed below -eps I";
  finding.message = os.str();
  return finding;
}

double lyapunov_delta(const Eigen::MatrixXd& e, const Eigen::MatrixXd& a_eff,
                      const Eigen::MatrixXd& p, const Eigen::VectorXd& x) {
  if (e.rows() != a_eff.rows() || e.rows() != p.rows() ||
      e.rows() != x.size() || e.rows() != e.cols() ||
      a_eff.rows() != a_eff.cols() || p.rows() != p.cols()) {
    throw DimensionMismatch("lyapunov_delta needs square E, A, P matching x");
  }
  const Eigen::VectorXd ax = a_eff * x;
  const Eigen::VectorXd ex = e * x;
  return ax.dot(p * ax) - ex.dot(p * ex);
}

Eigen::MatrixXd Certificate::p() const {
  const int nh = static_cast<int>(p_h.rows());
  const int nv = static_cast<int>(p_v.rows());
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(nh + nv, nh + nv);
  full.topLeftCorner(nh, nh) = p_h;
  full.bottomRightCorner(nv, nv) = p_v;
  return full;
}

Certificate make_certificate(const LmiProblem& problem,
                             const Eigen::VectorXd& y) {
  Certificate cert;
  cert.variant = problem.variant;
  Eigen::MatrixXd extra;
  problem.layout.unpack(y, cert.p_h, cert.p_v, extra);
  if (problem.layout.extra() != VariableLayout::Extra::None) {
    cert.extra = extra;
  }
  const sdp::MarginReport margins =
      sdp::evaluate_margins(problem.constraints, y);
  cert.margin = margins.neg_margin;
  cert.psd_min = margins.psd_min;
  return cert;
}

sdp::MarginReport evaluate_certificate(const LmiProblem& problem,
                                       const Certificate& certificate) {
  const Eigen::MatrixXd extra = certificate.extra.value_or(Eigen::MatrixXd::Zero(
      problem.layout.extra_rows(), problem.layout.extra_cols()));
  const Eigen::VectorXd y =
      problem.layout.pack(certificate.p_h, certificate.p_v, extra);
  return sdp::evaluate_margins(problem.constraints, y);
}

CertificateCheck check_stability_certificate(const Roesser2D& model,
                                             LmiVariant variant,
                                             const Eigen::MatrixXd& p_h,
                                             const Eigen::MatrixXd& p_v) {
  const LmiProblem problem = build_stability(model, variant);
  const Eigen::VectorXd y = problem.layout.pack(p_h, p_v);
  CertificateCheck check;
  check.neg_max_eigenvalue = -std::numeric_limits<double>::infinity();
  check.psd_min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& constraint : problem.constraints) {
    const Eigen::MatrixXd value = constraint.evaluate(y);
    if (constraint.sense == ConstraintSense::NegDef) {
      check.neg_max_eigenvalue =
          std::max(check.neg_max_eigenvalue, sym_max_eigenvalue(value));
    } else {
      check.psd_min_eigenvalue =
          std::min(check.psd_min_eigenvalue, sym_min_eigenvalue(value));
    }
  }
  check.pass = check.neg_max_eigenvalue <= -kPsdTolerance &&
               check.psd_min_eigenvalue >= -kPsdTolerance;
  return check;
}

CertifyResult certify_stability(const Roesser2D& model, LmiVariant variant,
                                const sdp::SolveOptions& options,
                                bool force_solve) {
  CertifyResult result;
  result.problem = build_stability(model, variant);
  result.precheck = structural_precheck(result.problem);

  sdp::SolveOptions solve_options = options;
  solve_options.epsilon = result.problem.epsilon;

  if (result.precheck && !force_solve) {
    sdp::Infeasible infeasible;
    infeasible.best_margin = -std::numeric_limits<double>::infinity();
    infeasible.structural = true;
    infeasible.structural_witness = result.precheck->null_direction;
    infeasible.note = result.precheck->message;
    result.outcome = infeasible;
    return result;
  }

  result.solver_ran = true;
  result.outcome = sdp::solve_feasibility(result.problem.constraints,
                                          result.problem.layout.dimension(),
                                          solve_options);
  if (const auto* feasible = std::get_if<sdp::Feasible>(&result.outcome)) {
    result.certificate = make_certificate(result.problem, feasible->y);
  }
  if (auto* infeasible = std::get_if<sdp::Infeasible>(&result.outcome)) {
    if (result.precheck) {
      infeasible->structural = true;
      infeasible->structural_witness = result.precheck->null_direction;
    }
  }
  return result;
}

}  // namespace roesser2d
