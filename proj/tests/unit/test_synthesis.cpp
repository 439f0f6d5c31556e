#include <doctest.h>

#include <random>

#include "roesser2d/synthesis.hpp"
#include "support/test_helpers.hpp"

using namespace roesser2d;
namespace rt = roesser2d::testing;

namespace {

Eigen::MatrixXd paper_state_gain() {
  Eigen::MatrixXd k(1, 2);
  k << -10.0, 21.0084;
  return k;
}

// Reduced pole of the heat loop under scalar output feedback, by hand
// elimination of the algebraic state.
double heat_output_pole(double k) {
  return (0.476 - 0.0047 * k) / (1.0 + 0.0047 * k);
}

}  // namespace

TEST_CASE("heat synthesis is structurally infeasible in both block forms") {
  const Roesser2D model = rt::heat_model_paper_rounded();
  for (const LmiVariant variant :
       {LmiVariant::Faithful, LmiVariant::SignCorrected}) {
    const SynthesisOutcome state =
        synthesize_state_feedback(model, variant, {});
    const auto* state_infeasible = std::get_if<SynthesisInfeasible>(&state);
    REQUIRE(state_infeasible != nullptr);
    CHECK(state_infeasible->info.structural);
    REQUIRE(state_infeasible->precheck.has_value());

    const SynthesisOutcome output =
        synthesize_output_feedback(model, variant, {});
    const auto* output_infeasible = std::get_if<SynthesisInfeasible>(&output);
    REQUIRE(output_infeasible != nullptr);
    CHECK(output_infeasible->info.structural);
  }
}

TEST_CASE("invertible-E plant yields a verified state-feedback gain") {
  Roesser2D model;
  model.dims = PartitionDims{1, 1, 2, 0};
  model.E = Eigen::MatrixXd::Identity(2, 2);
  model.A.resize(2, 2);
  model.A << 1.2, 0.0, 0.0, 0.3;
  model.B = Eigen::MatrixXd::Identity(2, 2);
  model.F.resize(0, 2);

  const SynthesisOutcome outcome =
      synthesize_state_feedback(model, LmiVariant::SignCorrected, {});
  const auto* gain = std::get_if<GainResult>(&outcome);
  REQUIRE(gain != nullptr);
  CHECK(gain->recovery_residual <= kRecoveryResidualLimit);
  CHECK(gain->verification.verified);
  CHECK(gain->verification.spectrum_verdict ==
        SpectrumVerdict::StableIndication);
  const Eigen::MatrixXd closed = model.A + model.B * gain->gain;
  CHECK(closed.eigenvalues().cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("zero B returns the zero gain with the open-loop verdict") {
  Roesser2D model;
  model.dims = PartitionDims{1, 1, 1, 0};
  model.E = Eigen::MatrixXd::Identity(2, 2);
  model.A.resize(2, 2);
  model.A << 0.4, 0.0, 0.0, 0.2;
  model.B = Eigen::MatrixXd::Zero(2, 1);
  model.F.resize(0, 2);

  const SynthesisOutcome outcome =
      synthesize_state_feedback(model, LmiVariant::SignCorrected, {});
  const auto* gain = std::get_if<GainResult>(&outcome);
  REQUIRE(gain != nullptr);
  CHECK(gain->gain.cwiseAbs().maxCoeff() == 0.0);
  // Open loop is stable here, so the open-loop verdict verifies.
  CHECK(gain->verification.verified);
  const VerificationReport open_loop =
      verify_gain(model, Eigen::MatrixXd::Zero(1, 2),
                  FeedbackMode::StateFeedback);
  CHECK(open_loop.spectrum_verdict == gain->verification.spectrum_verdict);
}

TEST_CASE("paper gain verifies on the heat model") {
  const Roesser2D model = rt::heat_model_paper_rounded();
  const VerificationReport report =
      verify_gain(model, paper_state_gain(), FeedbackMode::StateFeedback);
  CHECK(report.verified);
  CHECK(report.spectrum_verdict == SpectrumVerdict::StableIndication);

  Eigen::MatrixXd expected(2, 2);
  expected << 0.006, 0.9873948, -0.006, 0.0126052;
  CHECK((report.closed_loop_matrix - expected).cwiseAbs().maxCoeff() < 1e-12);

  REQUIRE(report.reduced_poles.size() == 1);
  // Hand elimination: pole = a11 / a22 of the closed loop.
  const double pole_oracle = expected(0, 0) / expected(1, 1);
  CHECK(std::abs(report.reduced_poles[0] -
                 std::complex<double>(pole_oracle, 0.0)) < 1e-12);
  CHECK(std::abs(report.reduced_poles[0].real() - 0.4758) < 1e-3);

  REQUIRE(report.simulation_decay.has_value());
  CHECK_FALSE(report.simulation_decay->diverged);
  CHECK(report.simulation_decay->terminal_sup_norm <
        report.simulation_decay->initial_sup_norm * 1e-12);
}

TEST_CASE("open-loop verification equals the admissibility analysis") {
  const Roesser2D model = rt::heat_model_paper_rounded();
  const VerificationReport report = verify_gain(
      model, Eigen::MatrixXd::Zero(1, 2), FeedbackMode::StateFeedback);
  CHECK(report.verified);
  REQUIRE(report.reduced_poles.size() == 1);
  CHECK(report.reduced_poles[0].real() == doctest::Approx(0.476));
  const AdmissibilityReport open_loop = analyze(model);
  CHECK(report.spectrum_verdict == open_loop.spectrum);
}

TEST_CASE("destabilizing state gain is reported unstable") {
  const Roesser2D model = rt::heat_model_paper_rounded();
  Eigen::MatrixXd k(1, 2);
  k << 100.0, 0.0;
  const VerificationReport report =
      verify_gain(model, k, FeedbackMode::StateFeedback);
  CHECK_FALSE(report.verified);
  CHECK(report.spectrum_verdict == SpectrumVerdict::UnstableWitness);
}

TEST_CASE("scalar output-feedback verdicts match the hand pole formula") {
  const Roesser2D model = rt::heat_model_paper_rounded();

  Eigen::MatrixXd k(1, 1);
  k << 10.0;
  const VerificationReport at_10 =
      verify_gain(model, k, FeedbackMode::OutputFeedback);
  REQUIRE(at_10.reduced_poles.size() == 1);
  CHECK(at_10.reduced_poles[0].real() ==
        doctest::Approx(heat_output_pole(10.0)).epsilon(1e-12));
  CHECK(at_10.reduced_poles[0].real() == doctest::Approx(0.4097).epsilon(1e-3));
  CHECK(at_10.verified);

  k << -100.0;
  const VerificationReport at_minus_100 =
      verify_gain(model, k, FeedbackMode::OutputFeedback);
  REQUIRE(at_minus_100.reduced_poles.size() == 1);
  CHECK(at_minus_100.reduced_poles[0].real() ==
        doctest::Approx(heat_output_pole(-100.0)).epsilon(1e-12));
  CHECK(at_minus_100.reduced_poles[0].real() ==
        doctest::Approx(1.785).epsilon(1e-3));
  CHECK_FALSE(at_minus_100.verified);

  std::mt19937 rng(7501);
  std::uniform_real_distribution<double> gain_dist(-50.0, 50.0);
  VerifyOptions fast;
  fast.run_simulation = false;  // the scan decides; keep the sweep cheap
  for (int trial = 0; trial < 20; ++trial) {
    const double kv = gain_dist(rng);
    k << kv;
    const VerificationReport report =
        verify_gain(model, k, FeedbackMode::OutputFeedback, fast);
    const bool oracle_stable =
        std::abs(heat_output_pole(kv)) < 1.0 - kStabilityTolerance;
    CHECK(report.verified == oracle_stable);
  }
}

TEST_CASE("recovery residual definition recomputes exactly") {
  std::mt19937 rng(7502);
  const Eigen::MatrixXd extra = rt::random_matrix(rng, 2, 2);
  const Eigen::MatrixXd gain = rt::random_matrix(rng, 1, 2);
  const Eigen::MatrixXd b = rt::random_matrix(rng, 2, 1);
  const Eigen::MatrixXd p = rt::random_spd(rng, 2);
  const double residual = recovery_residual(extra, gain, b, p);
  const double by_hand = (extra - gain.transpose() * b.transpose() * p).norm() /
                         std::max(1.0, extra.norm());
  CHECK(residual == doctest::Approx(by_hand).epsilon(1e-12));

  // A consistent extra has residual 0.
  const Eigen::MatrixXd consistent = gain.transpose() * b.transpose() * p;
  CHECK(recovery_residual(consistent, gain, b, p) < 1e-12);
}

TEST_CASE("gain dimension mismatches are rejected") {
  const Roesser2D model = rt::heat_model_paper_rounded();
  CHECK_THROWS_AS(verify_gain(model, Eigen::MatrixXd::Zero(1, 3),
                              FeedbackMode::StateFeedback),
                  DimensionMismatch);
  CHECK_THROWS_AS(verify_gain(model, Eigen::MatrixXd::Zero(1, 2),
                              FeedbackMode::OutputFeedback),
                  DimensionMismatch);
}

TEST_CASE("synthesized gains recompute their stored recovery residual") {
  Roesser2D model;
  model.dims = PartitionDims{1, 1, 2, 0};
  model.E = Eigen::MatrixXd::Identity(2, 2);
  model.A.resize(2, 2);
  model.A << 1.1, 0.2, -0.1, 0.4;
  model.B = Eigen::MatrixXd::Identity(2, 2);
  model.F.resize(0, 2);
  const SynthesisOutcome outcome =
      synthesize_state_feedback(model, LmiVariant::SignCorrected, {});
  const auto* gain = std::get_if<GainResult>(&outcome);
  REQUIRE(gain != nullptr);
  REQUIRE(gain->certificate.extra.has_value());
  const double recomputed =
      recovery_residual(*gain->certificate.extra, gain->gain, model.B,
                        gain->certificate.p());
  CHECK(std::abs(recomputed - gain->recovery_residual) <= 1e-12);
}
