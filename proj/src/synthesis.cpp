#include "roesser2d/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "roesser2d/charpoly.hpp"
#include "roesser2d/simulate.hpp"

namespace roesser2d {

namespace {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? kPinvTruncation * sv(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff && sv(k) > 0.0) inv(k) = 1.0 / sv(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

double recovery_residual(const Eigen::MatrixXd& extra,
                         const Eigen::MatrixXd& gain,
                         const Eigen::MatrixXd& b, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd reproduced = gain.transpose() * b.transpose() * p;
  return (extra - reproduced).norm() / std::max(1.0, extra.norm());
}

VerificationReport verify_gain(const Roesser2D& model,
                               const Eigen::MatrixXd& gain, FeedbackMode mode,
                               const VerifyOptions& options) {
  VerificationReport report;
  const ClosedLoopSpec loop{mode, gain};
  report.closed_loop_matrix = effective_dynamics(model, loop);

  Roesser2D closed = model;
  closed.A = report.closed_loop_matrix;

  // (a) Lyapunov-difference certificate attempt on the closed loop.
  const CertifyResult certify =
      certify_stability(closed, LmiVariant::DeltaDirect, options.solver);
  bool certificate_negative = false;
  if (const auto* feasible = std::get_if<sdp::Feasible>(&certify.outcome)) {
    report.certificate_outcome = "feasible";
    report.eq12_certificate = certify.certificate;
    certificate_negative = feasible->margin <= 0.0;
  } else if (std::holds_alternative<sdp::Infeasible>(certify.outcome)) {
    report.certificate_outcome = "infeasible";
    report.notes.push_back(
        "certificate search infeasible within budget; the condition is "
        "sufficient only, so this does not falsify the gain");
  } else {
    report.certificate_outcome = "indeterminate";
  }

  // (b) Root scan of the closed loop.
  const AdmissibilityReport scan =
      analyze(closed, options.spectrum_samples);
  report.spectrum_verdict = scan.spectrum;
  report.spectrum_witness = scan.witness;
  if (!scan.regular) {
    report.notes.push_back("closed loop is not regular");
  }

  // Reduced recursion after algebraic elimination; also gates (c).
  bool simulation_ok = true;
  try {
    const ReducedForm reduced = reduce_pointwise(closed, ClosedLoopSpec::open());
    const Eigen::MatrixXd dyn = reduced.reduced_dynamics();
    if (dyn.size() > 0) {
      const Eigen::VectorXcd poles =
          Eigen::EigenSolver<Eigen::MatrixXd>(dyn, false).eigenvalues();
      for (Eigen::Index k = 0; k < poles.size(); ++k) {
        report.reduced_poles.push_back(poles(k));
      }
    }
  } catch (const NonCausalPointwise& ex) {
    report.pointwise_causal = false;
    simulation_ok = false;
    report.notes.push_back(std::string("pointwise elimination failed: ") +
                           ex.what());
  }

  // (c) Decay simulation with unit boundary data.
  if (options.run_simulation && report.pointwise_causal) {
    const RankDecomposition decomposition = rank_decompose(closed);
    const BoundaryData boundary =
        BoundaryData::constant(decomposition.h.r, decomposition.v.r, 1.0);
    const TrajectoryGrid grid = simulate(closed, ClosedLoopSpec::open(),
                                         boundary, options.sim_n1,
                                         options.sim_n2);
    SimulationDecay decay;
    decay.n1 = grid.n1;
    decay.n2 = grid.n2;
    decay.diverged = grid.diverged;
    for (int j = 0; j < grid.n2; ++j) {
      if (grid.has_point(0, j)) {
        decay.initial_sup_norm = std::max(
            decay.initial_sup_norm,
            grid.x[static_cast<std::size_t>(grid.index(0, j))]
                .cwiseAbs()
                .maxCoeff());
      }
      if (grid.has_point(grid.n1 - 1, j)) {
        decay.terminal_sup_norm = std::max(
            decay.terminal_sup_norm,
            grid.x[static_cast<std::size_t>(grid.index(grid.n1 - 1, j))]
                .cwiseAbs()
                .maxCoeff());
      }
    }
    report.simulation_decay = decay;
    simulation_ok = !grid.diverged;
  }

  report.verified =
      report.spectrum_verdict == SpectrumVerdict::StableIndication &&
      !certificate_negative && simulation_ok && report.pointwise_causal;
  return report;
}

namespace {

SynthesisOutcome synthesize(const Roesser2D& model, LmiVariant variant,
                            const SynthesisOptions& options,
                            FeedbackMode mode) {
  const LmiProblem problem = mode == FeedbackMode::StateFeedback
                                 ? build_state_feedback(model, variant)
                                 : build_output_feedback(model, variant);

  const auto precheck = structural_precheck(problem);
  if (precheck && !options.force_solve) {
    sdp::Infeasible info;
    info.best_margin = -std::numeric_limits<double>::infinity();
    info.structural = true;
    info.structural_witness = precheck->null_direction;
    info.note = precheck->message;
    return SynthesisInfeasible{std::move(info), precheck};
  }

  sdp::SolveOptions solve_options = options.solver;
  solve_options.epsilon = problem.epsilon;
  sdp::SolveOutcome outcome = sdp::solve_feasibility(
      problem.constraints, problem.layout.dimension(), solve_options);

  if (auto* infeasible = std::get_if<sdp::Infeasible>(&outcome)) {
    if (precheck) {
      infeasible->structural = true;
      infeasible->structural_witness = precheck->null_direction;
    }
    return SynthesisInfeasible{*infeasible, precheck};
  }
  if (const auto* indeterminate = std::get_if<sdp::Indeterminate>(&outcome)) {
    return SynthesisIndeterminate{*indeterminate};
  }

  const auto& feasible = std::get<sdp::Feasible>(outcome);
  Certificate certificate = make_certificate(problem, feasible.y);
  const Eigen::MatrixXd extra = certificate.extra.value();
  const Eigen::MatrixXd p = certificate.p();

  // extra = K^T B^T P, so K^T = extra * pinv(B^T P).
  const Eigen::MatrixXd bt_p = model.B.transpose() * p;
  const Eigen::MatrixXd gain = (extra * pseudo_inverse(bt_p)).transpose();
  const double residual = recovery_residual(extra, gain, model.B, p);

  const bool no_actuation = model.B.size() == 0 || model.B.norm() == 0.0;
  if (no_actuation) {
    // The input cannot influence the loop; the only honest gain is zero and
    // its verification is the open-loop verdict.
    GainResult result;
    result.gain = Eigen::MatrixXd::Zero(
        model.dims.m, mode == FeedbackMode::StateFeedback ? model.dims.n()
                                                          : model.dims.p);
    result.recovery_residual = residual;
    result.certificate = std::move(certificate);
    result.verification =
        verify_gain(model, result.gain, mode, options.verify);
    result.verification.notes.push_back(
        "B is zero: the gain has no effect and the verdict is the open-loop "
        "one");
    return result;
  }

  if (residual > kRecoveryResidualLimit) {
    RecoveryInconsistent bad;
    bad.gain_attempt = gain;
    bad.recovery_residual = residual;
    bad.certificate = std::move(certificate);
    std::ostringstream os;
    os << "the solved extra matrix is not of the form K^T B^T P (relative "
          "residual "
       << residual
       << "); the linearizing change of variables admits points that no "
          "gain reproduces";
    bad.message = os.str();
    bad.verification = verify_gain(model, gain, mode, options.verify);
    return bad;
  }

  VerificationReport verification =
      verify_gain(model, gain, mode, options.verify);
  if (!verification.verified) {
    RecoveryInconsistent bad;
    bad.gain_attempt = gain;
    bad.recovery_residual = residual;
    bad.certificate = std::move(certificate);
    bad.message =
        "recovered gain failed independent verification despite a feasible "
        "synthesis certificate";
    bad.verification = std::move(verification);
    return bad;
  }

  GainResult result;
  result.gain = gain;
  result.recovery_residual = residual;
  result.certificate = std::move(certificate);
  result.verification = std::move(verification);
  return result;
}

}  // namespace

SynthesisOutcome synthesize_state_feedback(const Roesser2D& model,
                                           LmiVariant variant,
                                           const SynthesisOptions& options) {
  return synthesize(model, variant, options, FeedbackMode::StateFeedback);
}

SynthesisOutcome synthesize_output_feedback(const Roesser2D& model,
                                            LmiVariant variant,
                                            const SynthesisOptions& options) {
  return synthesize(model, variant, options, FeedbackMode::OutputFeedback);
}

}  // namespace roesser2d
