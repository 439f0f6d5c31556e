#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "roesser2d/charpoly.hpp"
#include "roesser2d/heat.hpp"
#include "roesser2d/jsonio.hpp"
#include "roesser2d/simulate.hpp"
#include "roesser2d/synthesis.hpp"

namespace {

using nlohmann::json;
using namespace roesser2d;

// Exit codes: 0 success/feasible, 2 infeasible/unstable/diverged,
// 3 usage/input error, 4 numerical indeterminate.
enum class Status { Ok, Fail, Error, Indeterminate };

const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
    case Status::Indeterminate: return "indeterminate";
  }
  return "?";
}

int exit_code(Status s) {
  switch (s) {
    case Status::Ok: return 0;
    case Status::Fail: return 2;
    case Status::Error: return 3;
    case Status::Indeterminate: return 4;
  }
  return 3;
}

class Report {
 public:
  explicit Report(std::string command)
      : command_(std::move(command)),
        start_(std::chrono::steady_clock::now()) {}

  void set_model_summary(const Roesser2D& model) {
    model_summary_ = model_summary_json(model);
  }
  void add_diagnostic(const std::string& severity, const std::string& code,
                      const std::string& message) {
    diagnostics_.push_back(
        {{"severity", severity}, {"code", code}, {"message", message}});
  }
  json& result() { return result_; }

  json document(Status status) const {
    const double elapsed =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start_)
            .count();
    json doc;
    doc["command"] = command_;
    doc["model_summary"] = model_summary_;
    json result = result_.is_null() ? json::object() : result_;
    result["status"] = to_string(status);
    doc["result"] = result;
    doc["diagnostics"] = diagnostics_;
    doc["timing_ms"] = elapsed;
    return doc;
  }

  int finish(Status status) const {
    std::cout << document(status).dump(2) << std::endl;
    return exit_code(status);
  }

 private:
  std::string command_;
  json model_summary_ = nullptr;
  json result_ = json::object();
  json diagnostics_ = json::array();
  std::chrono::steady_clock::time_point start_;
};

LmiVariant parse_variant(const std::string& name) {
  if (name == "faithful") return LmiVariant::Faithful;
  if (name == "sign-corrected") return LmiVariant::SignCorrected;
  if (name == "eq12") return LmiVariant::DeltaDirect;
  throw InvalidParams("unknown variant '" + name + "'");
}

Eigen::MatrixXd parse_gain(const std::string& csv, int rows, int cols) {
  std::vector<double> values;
  std::string token;
  std::istringstream stream(csv);
  while (std::getline(stream, token, ',')) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &consumed);
    } catch (const std::exception&) {
      throw InvalidParams("gain entry '" + token + "' is not a number");
    }
    while (consumed < token.size() &&
           std::isspace(static_cast<unsigned char>(token[consumed]))) {
      ++consumed;
    }
    if (consumed != token.size()) {
      throw InvalidParams("gain entry '" + token + "' is not a number");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != rows * cols) {
    std::ostringstream os;
    os << "gain needs " << rows * cols << " entries (" << rows << "x" << cols
       << " row-major), got " << values.size();
    throw DimensionMismatch(os.str());
  }
  Eigen::MatrixXd gain(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      gain(r, c) = values[static_cast<std::size_t>(r * cols + c)];
    }
  }
  return gain;
}

double parse_constant_boundary(const std::string& text) {
  const std::string prefix = "const:";
  if (text.rfind(prefix, 0) != 0) {
    throw InvalidParams("boundary must look like const:<value>");
  }
  try {
    return std::stod(text.substr(prefix.size()));
  } catch (const std::exception&) {
    throw InvalidParams("boundary value in '" + text + "' is not a number");
  }
}

json certify_to_json(const CertifyResult& certify) {
  json j;
  j["variant"] = to_string(certify.problem.variant);
  j["epsilon"] = certify.problem.epsilon;
  j["decision_dimension"] = certify.problem.layout.dimension();
  if (certify.precheck) {
    json witness = json::array();
    for (Eigen::Index k = 0; k < certify.precheck->null_direction.size(); ++k) {
      witness.push_back(certify.precheck->null_direction(k));
    }
    j["structural_precheck"] = {{"message", certify.precheck->message},
                                {"null_direction", std::move(witness)}};
  } else {
    j["structural_precheck"] = nullptr;
  }
  j["solver_ran"] = certify.solver_ran;
  j["outcome"] = to_json(certify.outcome);
  j["certificate"] =
      certify.certificate ? to_json(*certify.certificate) : json(nullptr);
  return j;
}

Status status_of_outcome(const sdp::SolveOutcome& outcome) {
  if (std::holds_alternative<sdp::Feasible>(outcome)) return Status::Ok;
  if (std::holds_alternative<sdp::Infeasible>(outcome)) return Status::Fail;
  return Status::Indeterminate;
}

// ---------------------------------------------------------------- commands

int cmd_model_validate(Report& report, const std::string& file) {
  const Roesser2D model = read_model(file);
  const ValidationReport validation = validate(model);
  report.set_model_summary(model);
  report.result()["validation"] = to_json(validation);
  if (validation.valid) return report.finish(Status::Ok);
  for (const auto& issue : validation.issues) {
    report.add_diagnostic("error", issue.code, issue.message);
  }
  return report.finish(Status::Error);
}

int cmd_analyze(Report& report, const std::string& file, int samples) {
  const Roesser2D model = read_model(file);
  ensure_valid(model);
  report.set_model_summary(model);
  const AdmissibilityReport analysis = analyze(model, samples);
  report.result()["admissibility"] = to_json(analysis);
  const bool pass = analysis.regular && analysis.causal &&
                    analysis.spectrum == SpectrumVerdict::StableIndication;
  if (!pass) {
    report.add_diagnostic("warning", "NOT_ADMISSIBLE_SCAN",
                          "regularity, causality or the stability scan "
                          "failed; see result.admissibility");
  }
  return report.finish(pass ? Status::Ok : Status::Fail);
}

int cmd_certify(Report& report, const std::string& file,
                const std::string& variant_name, bool force_solve,
                int max_iterations) {
  const Roesser2D model = read_model(file);
  ensure_valid(model);
  report.set_model_summary(model);
  const LmiVariant variant = parse_variant(variant_name);
  sdp::SolveOptions solve_options;
  if (max_iterations > 0) solve_options.max_iterations = max_iterations;
  const CertifyResult certify =
      certify_stability(model, variant, solve_options, force_solve);
  report.result()["certify"] = certify_to_json(certify);
  if (certify.precheck) {
    report.add_diagnostic("info", "STRUCTURAL_INFEASIBILITY",
                          certify.precheck->message);
  }
  return report.finish(status_of_outcome(certify.outcome));
}

json synthesis_to_json(const SynthesisOutcome& outcome) {
  json j;
  if (const auto* gain = std::get_if<GainResult>(&outcome)) {
    j["kind"] = "gain";
    j["K"] = matrix_to_json(gain->gain);
    j["recovery_residual"] = gain->recovery_residual;
    j["verification"] = to_json(gain->verification);
    j["certificate"] = to_json(gain->certificate);
  } else if (const auto* infeasible = std::get_if<SynthesisInfeasible>(&outcome)) {
    j["kind"] = "infeasible";
    j["outcome"] = to_json(sdp::SolveOutcome(infeasible->info));
  } else if (const auto* indeterminate =
                 std::get_if<SynthesisIndeterminate>(&outcome)) {
    j["kind"] = "indeterminate";
    j["outcome"] = to_json(sdp::SolveOutcome(indeterminate->info));
  } else {
    const auto& bad = std::get<RecoveryInconsistent>(outcome);
    j["kind"] = "recovery_inconsistent";
    j["K_attempt"] = matrix_to_json(bad.gain_attempt);
    j["recovery_residual"] = bad.recovery_residual;
    j["message"] = bad.message;
    j["certificate"] = to_json(bad.certificate);
    j["verification"] =
        bad.verification ? to_json(*bad.verification) : json(nullptr);
  }
  return j;
}

int cmd_synthesize(Report& report, const std::string& file,
                   const std::string& mode, const std::string& variant_name,
                   int max_iterations) {
  const Roesser2D model = read_model(file);
  ensure_valid(model);
  report.set_model_summary(model);
  const LmiVariant variant = parse_variant(variant_name);
  SynthesisOptions options;
  if (max_iterations > 0) options.solver.max_iterations = max_iterations;
  const SynthesisOutcome outcome =
      mode == "state" ? synthesize_state_feedback(model, variant, options)
                      : synthesize_output_feedback(model, variant, options);
  report.result()["synthesis"] = synthesis_to_json(outcome);
  report.result()["mode"] = mode;
  report.result()["variant"] = variant_name;

  if (const auto* infeasible = std::get_if<SynthesisInfeasible>(&outcome)) {
    if (infeasible->precheck) {
      report.add_diagnostic("info", "STRUCTURAL_INFEASIBILITY",
                            infeasible->precheck->message);
      report.add_diagnostic(
          "info", "REPORTED_GAIN_DISCREPANCY",
          "these synthesis conditions are structurally infeasible for every "
          "rank-deficient E, so previously reported gains for such models "
          "cannot have been produced by them as printed; use `verify` to "
          "check a candidate gain directly");
    }
    return report.finish(Status::Fail);
  }
  if (std::holds_alternative<SynthesisIndeterminate>(outcome)) {
    return report.finish(Status::Indeterminate);
  }
  if (const auto* bad = std::get_if<RecoveryInconsistent>(&outcome)) {
    report.add_diagnostic("warning", "RECOVERY_INCONSISTENT", bad->message);
    return report.finish(Status::Indeterminate);
  }
  return report.finish(Status::Ok);
}

int cmd_verify(Report& report, const std::string& file,
               const std::string& mode, const std::string& gain_csv) {
  const Roesser2D model = read_model(file);
  ensure_valid(model);
  report.set_model_summary(model);
  const int cols =
      mode == "state" ? model.dims.n() : model.dims.p;
  const Eigen::MatrixXd gain = parse_gain(gain_csv, model.dims.m, cols);
  const FeedbackMode feedback_mode = mode == "state"
                                         ? FeedbackMode::StateFeedback
                                         : FeedbackMode::OutputFeedback;
  const VerificationReport verification =
      verify_gain(model, gain, feedback_mode);
  report.result()["mode"] = mode;
  report.result()["K"] = matrix_to_json(gain);
  report.result()["verification"] = to_json(verification);
  return report.finish(verification.verified ? Status::Ok : Status::Fail);
}

json run_simulation_to_dir(const Roesser2D& model, const ClosedLoopSpec& loop,
                           double boundary_value, int n1, int n2,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const RankDecomposition decomposition = rank_decompose(model);
  const BoundaryData boundary = BoundaryData::constant(
      decomposition.h.r, decomposition.v.r, boundary_value);
  const TrajectoryGrid grid = simulate(model, loop, boundary, n1, n2);

  const auto trajectory_path = dir / "trajectory.csv";
  const auto heatmap_path = dir / "heatmap.csv";
  const auto metadata_path = dir / "trajectory.meta.json";
  export_trajectory(grid, trajectory_path.string(), TrajectoryFormat::CsvLong);
  export_trajectory(grid, heatmap_path.string(), TrajectoryFormat::CsvHeatmap);
  write_trajectory_metadata(grid, metadata_path.string());

  double terminal = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    if (grid.has_point(grid.n1 - 1, j)) {
      terminal = std::max(
          terminal, grid.x[static_cast<std::size_t>(grid.index(grid.n1 - 1, j))]
                        .cwiseAbs()
                        .maxCoeff());
    }
  }

  json j;
  j["N1"] = grid.n1;
  j["N2"] = grid.n2;
  j["diverged"] = grid.diverged;
  if (grid.truncated_i >= 0) {
    j["truncated_at"] = {grid.truncated_i, grid.truncated_j};
  } else {
    j["truncated_at"] = nullptr;
  }
  j["terminal_sup_norm"] = terminal;
  j["files"] = {trajectory_path.string(), heatmap_path.string(),
                metadata_path.string()};
  return j;
}

int cmd_simulate(Report& report, const std::string& file,
                 const std::string& mode, const std::string& gain_csv, int n1,
                 int n2, const std::string& boundary_text,
                 const std::string& out_dir) {
  const Roesser2D model = read_model(file);
  ensure_valid(model);
  report.set_model_summary(model);

  ClosedLoopSpec loop = ClosedLoopSpec::open();
  if (mode.empty() && !gain_csv.empty()) {
    throw InvalidParams("--gain requires --mode");
  }
  if (!mode.empty()) {
    if (gain_csv.empty()) {
      throw InvalidParams("--mode requires --gain");
    }
    const int cols = mode == "state" ? model.dims.n() : model.dims.p;
    const Eigen::MatrixXd gain = parse_gain(gain_csv, model.dims.m, cols);
    loop = mode == "state" ? ClosedLoopSpec::state_feedback(gain)
                           : ClosedLoopSpec::output_feedback(gain);
  }
  const double boundary_value = parse_constant_boundary(boundary_text);
  const json sim = run_simulation_to_dir(model, loop, boundary_value, n1, n2,
                                         out_dir);
  report.result()["simulation"] = sim;
  const bool diverged = sim.at("diverged").get<bool>();
  if (diverged) {
    report.add_diagnostic("warning", "DIVERGED",
                          "trajectory exceeded the divergence threshold; "
                          "grid truncated");
  }
  return report.finish(diverged ? Status::Fail : Status::Ok);
}

int cmd_heat_demo(Report& report, double dx, double dt,
                  const std::string& out_dir, bool paper_rounding) {
  const auto rounding = paper_rounding
                            ? CoefficientRounding::ThreeDecimalTruncation
                            : CoefficientRounding::Exact;
  const Roesser2D model = build_heat_model(HeatParams{dx, dt}, rounding);
  report.set_model_summary(model);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  write_model(model, (out / "model.json").string());

  json& result = report.result();
  result["params"] = {{"dx", dx},
                      {"dt", dt},
                      {"paper_rounding", paper_rounding},
                      {"a", model.A(0, 0)},
                      {"b", model.B(0, 0)}};
  result["model_file"] = (out / "model.json").string();

  bool expectations_met = true;

  const ValidationReport validation = validate(model);
  result["validation"] = to_json(validation);
  expectations_met = expectations_met && validation.valid;

  const AdmissibilityReport analysis = analyze(model);
  result["admissibility"] = to_json(analysis);
  const bool admissible =
      analysis.regular && analysis.causal &&
      analysis.spectrum == SpectrumVerdict::StableIndication;
  expectations_met = expectations_met && admissible;

  json certs;
  bool faithful_structural = false;
  bool sign_corrected_structural = false;
  bool eq12_feasible = false;
  for (const LmiVariant variant :
       {LmiVariant::Faithful, LmiVariant::SignCorrected,
        LmiVariant::DeltaDirect}) {
    const CertifyResult certify = certify_stability(model, variant, {});
    certs[to_string(variant)] = certify_to_json(certify);
    if (variant == LmiVariant::Faithful) {
      faithful_structural =
          certify.precheck.has_value() &&
          std::holds_alternative<sdp::Infeasible>(certify.outcome);
    } else if (variant == LmiVariant::SignCorrected) {
      sign_corrected_structural =
          certify.precheck.has_value() &&
          std::holds_alternative<sdp::Infeasible>(certify.outcome);
    } else {
      eq12_feasible = std::holds_alternative<sdp::Feasible>(certify.outcome);
    }
  }
  result["certify"] = std::move(certs);
  expectations_met = expectations_met && faithful_structural &&
                     sign_corrected_structural && eq12_feasible;

  // The reference gain from the published numerical results.
  Eigen::MatrixXd paper_gain(1, 2);
  paper_gain << -10.0, 21.0084;
  const VerificationReport verification =
      verify_gain(model, paper_gain, FeedbackMode::StateFeedback);
  result["reference_gain"] = {{"K", matrix_to_json(paper_gain)},
                              {"verification", to_json(verification)}};

  const json open_sim = run_simulation_to_dir(
      model, ClosedLoopSpec::open(), 1.0, 50, 50, out / "open");
  result["simulate_open"] = open_sim;
  expectations_met =
      expectations_met && !open_sim.at("diverged").get<bool>();

  const json closed_sim = run_simulation_to_dir(
      model, ClosedLoopSpec::state_feedback(paper_gain), 1.0, 50, 50,
      out / "closed");
  result["simulate_closed"] = closed_sim;
  if (verification.verified && closed_sim.at("diverged").get<bool>()) {
    expectations_met = false;
  }

  // Reproducibility stance: reproduce what is reproducible, surface the
  // conflicts between reported claims and computed results.
  json discrepancies = json::array();
  {
    std::ostringstream computed;
    computed << "the pointwise-eliminated open-loop recursion has pole "
             << model.A(0, 0)
             << " (< 1 for every positive dx, dt), and the computed "
                "zero-input response decays";
    discrepancies.push_back(
        {{"id", "open_loop_divergence"},
         {"reported", "the reference case study shows the zero-input "
                      "response growing without bound and concludes the "
                      "model is unstable"},
         {"computed", computed.str()},
         {"note", "the simulator follows the model equations; the reported "
                  "divergence is not reproducible from them"}});
  }
  discrepancies.push_back(
      {{"id", "state_feedback_synthesis_path"},
       {"reported", "the reference numerical results give the "
                    "state-feedback gain [-10, 21.0084] as the solution of "
                    "the printed synthesis conditions"},
       {"computed", "those conditions are structurally infeasible for this "
                    "model (rank(E) = 1 < 2), yet direct verification "
                    "confirms the gain stabilizes the loop; the synthesis "
                    "path that produced it cannot be reproduced"},
       {"note", "see result.certify and result.reference_gain"}});
  discrepancies.push_back(
      {{"id", "output_feedback_gain_shape"},
       {"reported", "the reference numerical results list a 1x2 "
                    "output-feedback gain"},
       {"computed", "with u = -K y and a scalar y the gain must be 1x1; the "
                    "listed entry is dimensionally unusable"},
       {"note", "no 1x1 value is guessed; output-feedback verification "
                "accepts scalar gains"}});
  result["discrepancies"] = std::move(discrepancies);

  report.add_diagnostic("info", "DISCREPANCY_SECTION",
                        "result.discrepancies lists reported claims that the "
                        "computed results contradict");

  const Status status = expectations_met ? Status::Ok : Status::Fail;
  const json document = report.document(status);
  {
    std::ofstream report_file(out / "report.json");
    if (!report_file) {
      throw IoError("cannot write " + (out / "report.json").string());
    }
    report_file << document.dump(2) << "\n";
  }
  std::cout << document.dump(2) << std::endl;
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D singular Roesser systems: modeling, certificates, "
               "synthesis, simulation"};
  app.require_subcommand(1);

  std::string file;
  std::string variant = "faithful";
  std::string mode;
  std::string gain_csv;
  std::string boundary_text = "const:1";
  std::string out_dir;
  int samples = kDefaultSpectrumSamples;
  int n1 = 50;
  int n2 = 50;
  bool force_solve = false;
  int max_iterations = 0;
  double dx = 0.1;
  double dt = 0.1;
  bool paper_rounding = false;

  auto* model_cmd = app.add_subcommand("model", "model file operations");
  model_cmd->require_subcommand(1);
  auto* validate_cmd =
      model_cmd->add_subcommand("validate", "structural validation");
  validate_cmd->add_option("file", file, "model JSON file")->required();

  auto* analyze_cmd =
      app.add_subcommand("analyze", "regularity, causality, root scan");
  analyze_cmd->add_option("file", file)->required();
  analyze_cmd->add_option("--samples", samples, "unit-circle samples");

  auto* certify_cmd =
      app.add_subcommand("certify", "stability certificate search");
  certify_cmd->add_option("file", file)->required();
  certify_cmd->add_option("--variant", variant)
      ->required()
      ->check(CLI::IsMember({"faithful", "sign-corrected", "eq12"}));
  certify_cmd->add_flag("--force-solve", force_solve,
                        "run the solver past a structural finding");
  certify_cmd->add_option("--max-iterations", max_iterations,
                          "solver iteration budget (0 = default)");

  auto* synthesize_cmd =
      app.add_subcommand("synthesize", "feedback gain synthesis");
  synthesize_cmd->add_option("file", file)->required();
  synthesize_cmd->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"state", "output"}));
  synthesize_cmd->add_option("--variant", variant)
      ->required()
      ->check(CLI::IsMember({"faithful", "sign-corrected"}));
  synthesize_cmd->add_option("--max-iterations", max_iterations,
                             "solver iteration budget (0 = default)");

  auto* verify_cmd =
      app.add_subcommand("verify", "independent verification of a gain");
  verify_cmd->add_option("file", file)->required();
  verify_cmd->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"state", "output"}));
  verify_cmd->add_option("--gain", gain_csv, "row-major comma-separated")
      ->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "grid simulation");
  simulate_cmd->add_option("file", file)->required();
  simulate_cmd->add_option("--mode", mode)
      ->check(CLI::IsMember({"state", "output"}));
  simulate_cmd->add_option("--gain", gain_csv);
  simulate_cmd->add_option("--n1", n1)->required();
  simulate_cmd->add_option("--n2", n2)->required();
  simulate_cmd->add_option("--boundary", boundary_text,
                           "const:<value> on all dynamic channels");
  simulate_cmd->add_option("--out", out_dir)->required();

  auto* heat_cmd = app.add_subcommand(
      "heat-demo", "heat-transfer case study, end to end");
  heat_cmd->add_option("--dx", dx)->required();
  heat_cmd->add_option("--dt", dt)->required();
  heat_cmd->add_option("--out", out_dir)->required();
  heat_cmd->add_flag("--paper-rounding", paper_rounding,
                     "use the 3-decimal truncated coefficients the "
                     "reference case study prints");

  std::string command_name = "";
  try {
    app.parse(argc, argv);
    if (validate_cmd->parsed()) command_name = "model validate";
    else if (analyze_cmd->parsed()) command_name = "analyze";
    else if (certify_cmd->parsed()) command_name = "certify";
    else if (synthesize_cmd->parsed()) command_name = "synthesize";
    else if (verify_cmd->parsed()) command_name = "verify";
    else if (simulate_cmd->parsed()) command_name = "simulate";
    else command_name = "heat-demo";
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Report report(argc > 1 ? argv[1] : "");
    report.add_diagnostic("error", "USAGE", e.what());
    return report.finish(Status::Error);
  }

  Report report(command_name);
  try {
    if (command_name == "model validate") {
      return cmd_model_validate(report, file);
    }
    if (command_name == "analyze") {
      return cmd_analyze(report, file, samples);
    }
    if (command_name == "certify") {
      return cmd_certify(report, file, variant, force_solve, max_iterations);
    }
    if (command_name == "synthesize") {
      return cmd_synthesize(report, file, mode, variant, max_iterations);
    }
    if (command_name == "verify") {
      return cmd_verify(report, file, mode, gain_csv);
    }
    if (command_name == "simulate") {
      return cmd_simulate(report, file, mode, gain_csv, n1, n2, boundary_text,
                          out_dir);
    }
    return cmd_heat_demo(report, dx, dt, out_dir, paper_rounding);
  } catch (const Error& ex) {
    report.add_diagnostic("error", ex.code(), ex.what());
    return report.finish(Status::Error);
  } catch (const std::exception& ex) {
    report.add_diagnostic("error", "INTERNAL", ex.what());
    return report.finish(Status::Error);
  }
}
