#include "roesser2d/jsonio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace roesser2d {

using nlohmann::json;

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

int require_int(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw SchemaError(std::string("missing key '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("key '") + key + "' must be an integer");
  }
  return v.get<int>();
}

Eigen::MatrixXd require_matrix(const json& j, const char* key, int rows,
                               int cols) {
  if (!j.contains(key)) {
    throw SchemaError(std::string("missing key '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_array()) {
    throw SchemaError(std::string("key '") + key +
                      "' must be an array of rows");
  }
  if (static_cast<int>(v.size()) != rows) {
    std::ostringstream os;
    os << "key '" << key << "' must have " << rows << " rows, got "
       << v.size();
    throw SchemaError(os.str());
  }
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = v.at(static_cast<std::size_t>(r));
    if (!row.is_array()) {
      std::ostringstream os;
      os << "key '" << key << "' row " << r << " is not an array";
      throw ParseError(os.str());
    }
    if (static_cast<int>(row.size()) != cols) {
      std::ostringstream os;
      os << "key '" << key << "' row " << r << " has " << row.size()
         << " entries, expected " << cols;
      throw ParseError(os.str());
    }
    for (int c = 0; c < cols; ++c) {
      const json& cell = row.at(static_cast<std::size_t>(c));
      if (!cell.is_number()) {
        std::ostringstream os;
        os << "key '" << key << "' entry (" << r << "," << c
           << ") is not a number";
        throw ParseError(os.str());
      }
      m(r, c) = cell.get<double>();
    }
  }
  return m;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) {
    throw ParseError(std::string("'") + key + "' must be an array of rows");
  }
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const int cols = static_cast<int>(j.at(0).size());
  json wrapper;
  wrapper[key] = j;
  return require_matrix(wrapper, key, rows, cols);
}

Roesser2D model_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("model file must be a JSON object");
  Roesser2D model;
  model.dims.n_h = require_int(j, "n_h");
  model.dims.n_v = require_int(j, "n_v");
  model.dims.m = require_int(j, "m");
  model.dims.p = require_int(j, "p");
  if (model.dims.n_h < 0 || model.dims.n_v < 0 || model.dims.m < 0 ||
      model.dims.p < 0 || model.dims.n() < 1) {
    throw SchemaError("dimensions must satisfy n_h, n_v >= 0, m, p >= 0, "
                      "n_h + n_v >= 1");
  }
  const int n = model.dims.n();
  model.E = require_matrix(j, "E", n, n);
  model.A = require_matrix(j, "A", n, n);
  if (model.dims.m > 0 || j.contains("B")) {
    model.B = require_matrix(j, "B", n, model.dims.m);
  } else {
    model.B = Eigen::MatrixXd::Zero(n, 0);
  }
  if (model.dims.p > 0 || j.contains("F")) {
    model.F = require_matrix(j, "F", model.dims.p, n);
  } else {
    model.F = Eigen::MatrixXd::Zero(0, n);
  }
  return model;
}

json model_to_json(const Roesser2D& model) {
  json j;
  j["n_h"] = model.dims.n_h;
  j["n_v"] = model.dims.n_v;
  j["m"] = model.dims.m;
  j["p"] = model.dims.p;
  j["E"] = matrix_to_json(model.E);
  j["A"] = matrix_to_json(model.A);
  if (model.dims.m > 0) j["B"] = matrix_to_json(model.B);
  if (model.dims.p > 0) j["F"] = matrix_to_json(model.F);
  return j;
}

Roesser2D read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("invalid JSON in '") + path +
                     "': " + ex.what());
  }
  return model_from_json(j);
}

void write_model(const Roesser2D& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(2) << "\n";
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

const char* to_string(SpectrumVerdict verdict) {
  switch (verdict) {
    case SpectrumVerdict::StableIndication: return "stable_indication";
    case SpectrumVerdict::UnstableWitness: return "unstable_witness";
    case SpectrumVerdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

json to_json(const ValidationReport& report) {
  json j;
  j["valid"] = report.valid;
  j["block_diagonal"] = report.block_diagonal;
  j["n"] = report.n;
  j["rank_E"] = report.rank_E;
  j["r_h"] = report.r_h;
  j["r_v"] = report.r_v;
  json issues = json::array();
  for (const auto& issue : report.issues) {
    issues.push_back({{"code", issue.code}, {"message", issue.message}});
  }
  j["issues"] = std::move(issues);
  return j;
}

json to_json(const AdmissibilityReport& report) {
  json j;
  j["regular"] = report.regular;
  j["causal"] = report.causal;
  j["spectrum"] = to_string(report.spectrum);
  if (report.witness) {
    j["witness"] = {{"z1", {report.witness->z1.real(), report.witness->z1.imag()}},
                    {"z2", {report.witness->z2.real(), report.witness->z2.imag()}},
                    {"abs_det", report.witness->abs_det},
                    {"sample_index", report.witness->sample_index}};
  } else {
    j["witness"] = nullptr;
  }
  j["samples_used"] = report.samples_used;
  j["roots_at_infinity"] = report.roots_at_infinity;
  j["notes"] = report.notes;
  return j;
}

json to_json(const Certificate& certificate) {
  json j;
  j["variant"] = to_string(certificate.variant);
  j["P_h"] = matrix_to_json(certificate.p_h);
  j["P_v"] = matrix_to_json(certificate.p_v);
  if (certificate.extra) {
    j["extra"] = matrix_to_json(*certificate.extra);
  } else {
    j["extra"] = nullptr;
  }
  j["margin"] = finite_or_null(certificate.margin);
  j["psd_min"] = finite_or_null(certificate.psd_min);
  return j;
}

json to_json(const sdp::SolveOutcome& outcome) {
  json j;
  if (const auto* feasible = std::get_if<sdp::Feasible>(&outcome)) {
    j["kind"] = "feasible";
    j["margin"] = finite_or_null(feasible->margin);
    j["psd_min"] = finite_or_null(feasible->psd_min);
    j["iterations_used"] = feasible->iterations_used;
  } else if (const auto* infeasible = std::get_if<sdp::Infeasible>(&outcome)) {
    j["kind"] = "infeasible";
    j["best_margin"] = finite_or_null(infeasible->best_margin);
    j["structural"] = infeasible->structural;
    if (infeasible->structural_witness) {
      json witness = json::array();
      for (Eigen::Index k = 0; k < infeasible->structural_witness->size(); ++k) {
        witness.push_back((*infeasible->structural_witness)(k));
      }
      j["structural_witness"] = std::move(witness);
    } else {
      j["structural_witness"] = nullptr;
    }
    j["note"] = infeasible->note;
  } else {
    const auto& indeterminate = std::get<sdp::Indeterminate>(outcome);
    j["kind"] = "indeterminate";
    j["iterations_used"] = indeterminate.iterations_used;
    j["best_margin"] = finite_or_null(indeterminate.best_margin);
    j["diagnostic"] = indeterminate.diagnostic;
  }
  return j;
}

json to_json(const VerificationReport& report) {
  json j;
  j["closed_loop_matrix"] = matrix_to_json(report.closed_loop_matrix);
  j["certificate_outcome"] = report.certificate_outcome;
  if (report.eq12_certificate) {
    j["eq12_certificate"] = to_json(*report.eq12_certificate);
  } else {
    j["eq12_certificate"] = nullptr;
  }
  j["spectrum_verdict"] = to_string(report.spectrum_verdict);
  if (report.spectrum_witness) {
    j["spectrum_witness"] = {
        {"z1",
         {report.spectrum_witness->z1.real(), report.spectrum_witness->z1.imag()}},
        {"z2",
         {report.spectrum_witness->z2.real(), report.spectrum_witness->z2.imag()}},
        {"abs_det", report.spectrum_witness->abs_det}};
  } else {
    j["spectrum_witness"] = nullptr;
  }
  if (report.simulation_decay) {
    j["simulation_decay"] = {
        {"N1", report.simulation_decay->n1},
        {"N2", report.simulation_decay->n2},
        {"diverged", report.simulation_decay->diverged},
        {"terminal_sup_norm",
         finite_or_null(report.simulation_decay->terminal_sup_norm)},
        {"initial_sup_norm",
         finite_or_null(report.simulation_decay->initial_sup_norm)}};
  } else {
    j["simulation_decay"] = nullptr;
  }
  json poles = json::array();
  for (const auto& pole : report.reduced_poles) {
    poles.push_back({pole.real(), pole.imag()});
  }
  j["reduced_poles"] = std::move(poles);
  j["pointwise_causal"] = report.pointwise_causal;
  j["verified"] = report.verified;
  j["notes"] = report.notes;
  return j;
}

json model_summary_json(const Roesser2D& model) {
  json j;
  j["n_h"] = model.dims.n_h;
  j["n_v"] = model.dims.n_v;
  j["m"] = model.dims.m;
  j["p"] = model.dims.p;
  j["rank_E"] = numerical_rank(model.E);
  return j;
}

}  // namespace roesser2d
