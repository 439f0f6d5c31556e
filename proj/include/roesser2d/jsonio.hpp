#pragma once

#include <string>

#include <json.hpp>

#include "roesser2d/admissibility.hpp"
#include "roesser2d/lmi.hpp"
#include "roesser2d/model.hpp"
#include "roesser2d/sdp.hpp"
#include "roesser2d/synthesis.hpp"

namespace roesser2d {

// Model file schema: integers n_h, n_v, m, p and row-major arrays of arrays
// E, A (n x n), B (n x m, optional when m = 0), F (p x n, optional when
// p = 0). Doubles round-trip exactly.
Roesser2D read_model(const std::string& path);
void write_model(const Roesser2D& model, const std::string& path);

Roesser2D model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Roesser2D& model);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* key);

// Report fragments shared by the CLI and tests. Non-finite numbers are
// serialized as null.
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const AdmissibilityReport& report);
nlohmann::json to_json(const Certificate& certificate);
nlohmann::json to_json(const sdp::SolveOutcome& outcome);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json model_summary_json(const Roesser2D& model);

const char* to_string(SpectrumVerdict verdict);

}  // namespace roesser2d
