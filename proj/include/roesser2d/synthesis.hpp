#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roesser2d/admissibility.hpp"
#include "roesser2d/lmi.hpp"
#include "roesser2d/model.hpp"

namespace roesser2d {

inline constexpr double kRecoveryResidualLimit = 1e-6;
inline constexpr double kPinvTruncation = 1e-10;

struct SimulationDecay {
  int n1 = 0;
  int n2 = 0;
  bool diverged = false;
  double terminal_sup_norm = 0.0;  // sup over j at the last computed i
  double initial_sup_norm = 0.0;   // sup over j at i = 0
};

// Independent checks attached to every gain: a Lyapunov-difference
// certificate attempt, the root scan, and a decay simulation. The
// certificate is a sufficient condition, so only a feasible-with-negative-
// margin result can count against the gain; scan and simulation verdicts
// are decisive.
struct VerificationReport {
  Eigen::MatrixXd closed_loop_matrix;
  std::optional<Certificate> eq12_certificate;
  std::string certificate_outcome;  // feasible / infeasible / indeterminate
  SpectrumVerdict spectrum_verdict = SpectrumVerdict::Indeterminate;
  std::optional<SpectrumWitness> spectrum_witness;
  std::optional<SimulationDecay> simulation_decay;
  std::vector<std::complex<double>> reduced_poles;
  bool pointwise_causal = true;
  bool verified = false;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  int spectrum_samples = kDefaultSpectrumSamples;
  bool run_simulation = true;
  int sim_n1 = 50;
  int sim_n2 = 50;
  sdp::SolveOptions solver;
};

VerificationReport verify_gain(const Roesser2D& model,
                               const Eigen::MatrixXd& gain, FeedbackMode mode,
                               const VerifyOptions& options = {});

struct GainResult {
  Eigen::MatrixXd gain;
  double recovery_residual = 0.0;
  VerificationReport verification;
  Certificate certificate;
};

struct SynthesisInfeasible {
  sdp::Infeasible info;
  std::optional<StructuralInfeasibility> precheck;
};

struct SynthesisIndeterminate {
  sdp::Indeterminate info;
};

// The solver accepted a point whose extra matrix does not live on the
// K^T B^T P manifold (or whose recovered gain fails verification); all
// diagnostics are carried instead of a gain.
struct RecoveryInconsistent {
  Eigen::MatrixXd gain_attempt;
  double recovery_residual = 0.0;
  std::optional<VerificationReport> verification;
  Certificate certificate;
  std::string message;
};

using SynthesisOutcome = std::variant<GainResult, SynthesisInfeasible,
                                      SynthesisIndeterminate,
                                      RecoveryInconsistent>;

struct SynthesisOptions {
  sdp::SolveOptions solver;
  VerifyOptions verify;
  bool force_solve = false;  // run the solver even past a structural finding
};

// Solve the synthesis condition, recover K from the change of variables
// (Moore-Penrose, singular values below 1e-10 relative truncated), then
// verify. Recovery residual is ||extra - K^T B^T P||_F / max(1, ||extra||_F).
SynthesisOutcome synthesize_state_feedback(const Roesser2D& model,
                                           LmiVariant variant,
                                           const SynthesisOptions& options = {});
SynthesisOutcome synthesize_output_feedback(const Roesser2D& model,
                                            LmiVariant variant,
                                            const SynthesisOptions& options = {});

double recovery_residual(const Eigen::MatrixXd& extra,
                         const Eigen::MatrixXd& gain,
                         const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& p);

}  // namespace roesser2d
