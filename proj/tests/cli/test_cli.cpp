#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "roesser2d/heat.hpp"
#include "roesser2d/jsonio.hpp"
#include "support/test_helpers.hpp"

using nlohmann::json;
using namespace roesser2d;
namespace rt = roesser2d::testing;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;
  json report;
};

CliRun run_cli(const std::string& args) {
  CliRun run;
  const std::string command = std::string(ROESSER2D_CLI_PATH) + " " + args +
                              " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    run.output += buffer.data();
  }
  const int status = pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!run.output.empty()) {
    run.report = json::parse(run.output, nullptr, false);
  }
  return run;
}

json report_schema() {
  std::ifstream in(ROESSER2D_SCHEMA_PATH);
  REQUIRE(in.good());
  return json::parse(in);
}

void check_schema(const CliRun& run) {
  REQUIRE_FALSE(run.report.is_discarded());
  std::string why;
  const bool ok =
      rt::validate_against_schema(run.report, report_schema(), &why);
  INFO("schema violation: ", why);
  CHECK(ok);
}

std::filesystem::path write_heat_model_file() {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_heat.json";
  write_model(rt::heat_model_paper_rounded(), path.string());
  return path;
}

std::filesystem::path write_unstable_model_file() {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_unstable.json";
  write_model(rt::diagonal_model(1.5, 0.5), path.string());
  return path;
}

}  // namespace

TEST_CASE("model validate: valid file exits 0 with a schema-valid report") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("model validate " + path.string());
  CHECK(run.exit_code == 0);
  check_schema(run);
  CHECK(run.report.at("result").at("status") == "ok");
  CHECK(run.report.at("command") == "model validate");
  CHECK(run.report.at("model_summary").at("rank_E") == 1);
}

TEST_CASE("model validate: coupling entry exits 3 with the error code") {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_coupled.json";
  Roesser2D model = rt::diagonal_model(0.0, 0.0);
  model.E(0, 1) = 0.5;
  write_model(model, path.string());
  const CliRun run = run_cli("model validate " + path.string());
  CHECK(run.exit_code == 3);
  check_schema(run);
  REQUIRE_FALSE(run.report.at("diagnostics").empty());
  CHECK(run.report.at("diagnostics").at(0).at("code") ==
        "NON_BLOCK_DIAGONAL_E");
}

TEST_CASE("model validate: missing file exits 3 with code IO") {
  const CliRun run = run_cli("model validate /nonexistent/file.json");
  CHECK(run.exit_code == 3);
  check_schema(run);
  CHECK(run.report.at("diagnostics").at(0).at("code") == "IO");
}

TEST_CASE("analyze: heat model is admissible by scan, exit 0") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("analyze " + path.string());
  CHECK(run.exit_code == 0);
  check_schema(run);
  const json& adm = run.report.at("result").at("admissibility");
  CHECK(adm.at("regular") == true);
  CHECK(adm.at("causal") == true);
  CHECK(adm.at("spectrum") == "stable_indication");
}

TEST_CASE("analyze: unstable model exits 2 with the witness") {
  const auto path = write_unstable_model_file();
  const CliRun run = run_cli("analyze " + path.string() + " --samples 129");
  CHECK(run.exit_code == 2);
  check_schema(run);
  const json& adm = run.report.at("result").at("admissibility");
  CHECK(adm.at("spectrum") == "unstable_witness");
  CHECK(adm.at("samples_used") == 129);
  const double z1_re = adm.at("witness").at("z1").at(0).get<double>();
  CHECK(std::abs(z1_re) == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("analyze: irregular model exits 2 with regular=false") {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_irregular.json";
  {
    std::ofstream out(path);
    out << R"({"n_h":1,"n_v":0,"m":0,"p":0,"E":[[0]],"A":[[0]]})";
  }
  const CliRun run = run_cli("analyze " + path.string());
  CHECK(run.exit_code == 2);
  check_schema(run);
  CHECK(run.report.at("result").at("admissibility").at("regular") == false);
}

TEST_CASE("certify: faithful on the heat model exits 2 with structural flag") {
  const auto path = write_heat_model_file();
  for (const std::string variant : {"faithful", "sign-corrected"}) {
    const CliRun run =
        run_cli("certify " + path.string() + " --variant " + variant);
    CHECK(run.exit_code == 2);
    check_schema(run);
    const json& outcome = run.report.at("result").at("certify").at("outcome");
    CHECK(outcome.at("kind") == "infeasible");
    CHECK(outcome.at("structural") == true);
    CHECK(run.report.at("result").at("certify").at("solver_ran") == false);
  }
}

TEST_CASE("certify: eq12 on the heat model exits 0 with a certificate") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("certify " + path.string() + " --variant eq12");
  CHECK(run.exit_code == 0);
  check_schema(run);
  const json& certify = run.report.at("result").at("certify");
  CHECK(certify.at("outcome").at("kind") == "feasible");
  CHECK(certify.at("certificate").at("margin").get<double>() > 0.0);
}

TEST_CASE("certify: eq12 on an unstable model exits 2") {
  const auto path = write_unstable_model_file();
  const CliRun run = run_cli("certify " + path.string() + " --variant eq12");
  CHECK(run.exit_code == 2);
  check_schema(run);
}

TEST_CASE("certify: force-solve reports the precheck alongside the solver") {
  const auto path = write_heat_model_file();
  const CliRun run =
      run_cli("certify " + path.string() + " --variant faithful --force-solve");
  CHECK(run.exit_code == 2);
  check_schema(run);
  const json& certify = run.report.at("result").at("certify");
  CHECK(certify.at("solver_ran") == true);
  CHECK_FALSE(certify.at("structural_precheck").is_null());
}

TEST_CASE("synthesize: heat model exits 2 with the discrepancy diagnostics") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("synthesize " + path.string() +
                             " --mode state --variant faithful");
  CHECK(run.exit_code == 2);
  check_schema(run);
  bool found_note = false;
  for (const auto& diag : run.report.at("diagnostics")) {
    found_note = found_note || diag.at("code") == "REPORTED_GAIN_DISCREPANCY";
  }
  CHECK(found_note);
}

TEST_CASE("synthesize: planted feasible model exits 0 with a verified gain") {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_plant.json";
  Roesser2D model;
  model.dims = PartitionDims{1, 1, 2, 0};
  model.E = Eigen::MatrixXd::Identity(2, 2);
  model.A.resize(2, 2);
  model.A << 1.2, 0.0, 0.0, 0.3;
  model.B = Eigen::MatrixXd::Identity(2, 2);
  model.F.resize(0, 2);
  write_model(model, path.string());
  const CliRun run = run_cli("synthesize " + path.string() +
                             " --mode state --variant sign-corrected");
  CHECK(run.exit_code == 0);
  check_schema(run);
  const json& synthesis = run.report.at("result").at("synthesis");
  CHECK(synthesis.at("kind") == "gain");
  CHECK(synthesis.at("verification").at("verified") == true);
}

TEST_CASE("synthesize: missing --mode is a usage error, exit 3") {
  const auto path = write_heat_model_file();
  const CliRun run =
      run_cli("synthesize " + path.string() + " --variant faithful");
  CHECK(run.exit_code == 3);
  check_schema(run);
  CHECK(run.report.at("diagnostics").at(0).at("code") == "USAGE");
}

TEST_CASE("verify: reference gain passes with the reduced pole reported") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("verify " + path.string() +
                             " --mode state --gain \"-10,21.0084\"");
  CHECK(run.exit_code == 0);
  check_schema(run);
  const json& verification = run.report.at("result").at("verification");
  CHECK(verification.at("verified") == true);
  const double pole = verification.at("reduced_poles").at(0).at(0).get<double>();
  CHECK(std::abs(pole - 0.4758) < 1e-3);
}

TEST_CASE("verify: destabilizing output gain exits 2") {
  const auto path = write_heat_model_file();
  const CliRun run =
      run_cli("verify " + path.string() + " --mode output --gain \"-100\"");
  CHECK(run.exit_code == 2);
  check_schema(run);
  CHECK(run.report.at("result").at("verification").at("verified") == false);
}

TEST_CASE("verify: wrong gain arity exits 3") {
  const auto path = write_heat_model_file();
  const CliRun run =
      run_cli("verify " + path.string() + " --mode state --gain \"1,2,3\"");
  CHECK(run.exit_code == 3);
  check_schema(run);
  CHECK(run.report.at("diagnostics").at(0).at("code") == "DIMENSION_MISMATCH");
}

TEST_CASE("simulate: open loop writes artifacts and exits 0") {
  const auto path = write_heat_model_file();
  const auto out_dir =
      std::filesystem::temp_directory_path() / "roesser2d_cli_sim";
  std::filesystem::remove_all(out_dir);
  const CliRun run =
      run_cli("simulate " + path.string() + " --n1 50 --n2 50 --boundary "
              "const:1 --out " + out_dir.string());
  CHECK(run.exit_code == 0);
  check_schema(run);
  CHECK(std::filesystem::exists(out_dir / "trajectory.csv"));
  CHECK(std::filesystem::exists(out_dir / "heatmap.csv"));
  CHECK(std::filesystem::exists(out_dir / "trajectory.meta.json"));
  CHECK(run.report.at("result").at("simulation").at("diverged") == false);
}

TEST_CASE("simulate: diverging model exits 2 and flags divergence") {
  const auto path =
      std::filesystem::temp_directory_path() / "roesser2d_cli_grow.json";
  Roesser2D model;
  model.dims = PartitionDims{1, 1, 0, 0};
  model.E = Eigen::MatrixXd::Zero(2, 2);
  model.E(0, 0) = 1.0;
  model.A.resize(2, 2);
  model.A << 1.2, 0.0, -1.2, 1.0;
  model.B.resize(2, 0);
  model.F.resize(0, 2);
  write_model(model, path.string());
  const auto out_dir =
      std::filesystem::temp_directory_path() / "roesser2d_cli_sim_div";
  std::filesystem::remove_all(out_dir);
  const CliRun run = run_cli("simulate " + path.string() +
                             " --n1 150 --n2 3 --out " + out_dir.string());
  CHECK(run.exit_code == 2);
  check_schema(run);
  CHECK(run.report.at("result").at("simulation").at("diverged") == true);
  std::ifstream meta(out_dir / "trajectory.meta.json");
  const json sidecar = json::parse(meta);
  CHECK(sidecar.at("diverged") == true);
}

TEST_CASE("simulate: closed loop with the reference gain decays hard") {
  const auto path = write_heat_model_file();
  const auto out_dir =
      std::filesystem::temp_directory_path() / "roesser2d_cli_sim_closed";
  std::filesystem::remove_all(out_dir);
  const CliRun run = run_cli(
      "simulate " + path.string() +
      " --mode state --gain \"-10,21.0084\" --n1 50 --n2 50 --out " +
      out_dir.string());
  CHECK(run.exit_code == 0);
  const double terminal =
      run.report.at("result").at("simulation").at("terminal_sup_norm")
          .get<double>();
  CHECK(terminal <= 1e-12);
}

TEST_CASE("heat-demo: reference configuration meets every expectation") {
  const auto out_dir =
      std::filesystem::temp_directory_path() / "roesser2d_cli_demo";
  std::filesystem::remove_all(out_dir);
  const CliRun run = run_cli("heat-demo --dx 0.1 --dt 0.1 --paper-rounding "
                             "--out " + out_dir.string());
  CHECK(run.exit_code == 0);
  check_schema(run);
  const json& result = run.report.at("result");
  CHECK(result.at("params").at("a") == 0.476);
  CHECK(result.at("certify").at("faithful").at("outcome").at("structural") ==
        true);
  CHECK(result.at("certify").at("eq12").at("outcome").at("kind") ==
        "feasible");
  CHECK(result.at("reference_gain").at("verification").at("verified") ==
        true);
  REQUIRE(result.at("discrepancies").is_array());
  REQUIRE(result.at("discrepancies").size() >= 2);
  bool has_divergence = false;
  bool has_synthesis_path = false;
  for (const auto& item : result.at("discrepancies")) {
    has_divergence =
        has_divergence || item.at("id") == "open_loop_divergence";
    has_synthesis_path =
        has_synthesis_path || item.at("id") == "state_feedback_synthesis_path";
  }
  CHECK(has_divergence);
  CHECK(has_synthesis_path);
  CHECK(std::filesystem::exists(out_dir / "model.json"));
  CHECK(std::filesystem::exists(out_dir / "report.json"));
  CHECK(std::filesystem::exists(out_dir / "open" / "trajectory.csv"));
  CHECK(std::filesystem::exists(out_dir / "closed" / "heatmap.csv"));

  // The on-disk report is the same schema-valid document.
  std::ifstream file(out_dir / "report.json");
  const json persisted = json::parse(file);
  std::string why;
  CHECK(rt::validate_against_schema(persisted, report_schema(), &why));
}

TEST_CASE("heat-demo: other steps run the full pipeline") {
  const auto out_dir =
      std::filesystem::temp_directory_path() / "roesser2d_cli_demo11";
  std::filesystem::remove_all(out_dir);
  const CliRun run =
      run_cli("heat-demo --dx 1 --dt 1 --out " + out_dir.string());
  check_schema(run);
  const json& result = run.report.at("result");
  CHECK(result.at("params").at("a").get<double>() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(run.exit_code == 0);
}

TEST_CASE("heat-demo: invalid step exits 3") {
  const CliRun run = run_cli("heat-demo --dx 0 --dt 0.1 --out /tmp/r2d_bad");
  CHECK(run.exit_code == 3);
  check_schema(run);
  CHECK(run.report.at("diagnostics").at(0).at("code") == "INVALID_PARAMS");
}

TEST_CASE("certify: exhausted iteration budget exits 4") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("certify " + path.string() +
                             " --variant eq12 --max-iterations 1");
  CHECK(run.exit_code == 4);
  check_schema(run);
  CHECK(run.report.at("result").at("certify").at("outcome").at("kind") ==
        "indeterminate");
  CHECK(run.report.at("result").at("status") == "indeterminate");
}

TEST_CASE("simulate: --gain without --mode is a usage error") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("simulate " + path.string() +
                             " --gain \"1,2\" --n1 5 --n2 5 --out /tmp/r2d_x");
  CHECK(run.exit_code == 3);
  check_schema(run);
}

TEST_CASE("analyze: zero samples is a usage error") {
  const auto path = write_heat_model_file();
  const CliRun run = run_cli("analyze " + path.string() + " --samples 0");
  CHECK(run.exit_code == 3);
  check_schema(run);
  CHECK(run.report.at("diagnostics").at(0).at("code") == "INVALID_PARAMS");
}
