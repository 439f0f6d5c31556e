#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "roesser2d/charpoly.hpp"
#include "roesser2d/heat.hpp"
#include "roesser2d/jsonio.hpp"
#include "roesser2d/simulate.hpp"
#include "roesser2d/synthesis.hpp"

namespace py = pybind11;
using namespace roesser2d;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default:
      return py::none();
  }
}

LmiVariant variant_from_name(const std::string& name) {
  if (name == "faithful") return LmiVariant::Faithful;
  if (name == "sign-corrected") return LmiVariant::SignCorrected;
  if (name == "eq12") return LmiVariant::DeltaDirect;
  throw InvalidParams("unknown variant '" + name +
                      "' (expected faithful, sign-corrected or eq12)");
}

FeedbackMode mode_from_name(const std::string& name) {
  if (name == "open") return FeedbackMode::Open;
  if (name == "state") return FeedbackMode::StateFeedback;
  if (name == "output") return FeedbackMode::OutputFeedback;
  throw InvalidParams("unknown mode '" + name +
                      "' (expected open, state or output)");
}

ClosedLoopSpec loop_from(const std::string& mode, const Eigen::MatrixXd& gain) {
  switch (mode_from_name(mode)) {
    case FeedbackMode::Open:
      return ClosedLoopSpec::open();
    case FeedbackMode::StateFeedback:
      return ClosedLoopSpec::state_feedback(gain);
    case FeedbackMode::OutputFeedback:
      return ClosedLoopSpec::output_feedback(gain);
  }
  return ClosedLoopSpec::open();
}

py::dict grid_to_py(const TrajectoryGrid& grid) {
  const int n = grid.dims.n();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  py::array_t<double> x({grid.n1, grid.n2, n});
  py::array_t<double> y({grid.n1, grid.n2, grid.dims.p});
  py::array_t<double> u({grid.n1, grid.n2, grid.dims.m});
  auto xv = x.mutable_unchecked<3>();
  auto yv = y.mutable_unchecked<3>();
  auto uv = u.mutable_unchecked<3>();
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const bool present = grid.has_point(i, j);
      const std::size_t idx = static_cast<std::size_t>(grid.index(i, j));
      for (int k = 0; k < n; ++k) {
        xv(i, j, k) = present ? grid.x[idx](k) : nan;
      }
      for (int k = 0; k < grid.dims.p; ++k) {
        yv(i, j, k) = present ? grid.y[idx](k) : nan;
      }
      for (int k = 0; k < grid.dims.m; ++k) {
        uv(i, j, k) = present ? grid.u[idx](k) : nan;
      }
    }
  }
  py::dict out;
  out["x"] = x;
  out["y"] = y;
  out["u"] = u;
  out["diverged"] = grid.diverged;
  out["truncated_at"] =
      grid.truncated_i >= 0
          ? py::object(py::make_tuple(grid.truncated_i, grid.truncated_j))
          : py::object(py::none());
  out["sup_norm_per_antidiagonal"] =
      py::cast(grid.sup_norm_per_antidiagonal);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2D singular Roesser systems: stability certificates, feedback "
            "synthesis and grid simulation";

  py::register_exception<Error>(m, "Roesser2DError");

  py::class_<PartitionDims>(m, "PartitionDims")
      .def(py::init([](int n_h, int n_v, int m_, int p) {
             return PartitionDims{n_h, n_v, m_, p};
           }),
           py::arg("n_h"), py::arg("n_v"), py::arg("m") = 0, py::arg("p") = 0)
      .def_readonly("n_h", &PartitionDims::n_h)
      .def_readonly("n_v", &PartitionDims::n_v)
      .def_readonly("m", &PartitionDims::m)
      .def_readonly("p", &PartitionDims::p)
      .def_property_readonly("n", &PartitionDims::n);

  py::class_<Roesser2D>(m, "Roesser2D")
      .def(py::init([](int n_h, int n_v, const Eigen::MatrixXd& e,
                       const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& f) {
             Roesser2D model;
             model.dims = PartitionDims{n_h, n_v, static_cast<int>(b.cols()),
                                        static_cast<int>(f.rows())};
             model.E = e;
             model.A = a;
             model.B = b.size() > 0 ? b : Eigen::MatrixXd::Zero(n_h + n_v, 0);
             model.F = f.size() > 0 ? f : Eigen::MatrixXd::Zero(0, n_h + n_v);
             return model;
           }),
           py::arg("n_h"), py::arg("n_v"), py::arg("E"), py::arg("A"),
           py::arg("B") = Eigen::MatrixXd(),
           py::arg("F") = Eigen::MatrixXd())
      .def_readonly("dims", &Roesser2D::dims)
      .def_readonly("E", &Roesser2D::E)
      .def_readonly("A", &Roesser2D::A)
      .def_readonly("B", &Roesser2D::B)
      .def_readonly("F", &Roesser2D::F);

  m.def("validate",
        [](const Roesser2D& model) { return json_to_py(to_json(validate(model))); },
        py::arg("model"));

  m.def("rank_decompose", [](const Roesser2D& model) {
    const RankDecomposition d = rank_decompose(model);
    py::dict out;
    py::dict h, v;
    h["U"] = d.h.u;
    h["V"] = d.h.v;
    h["r"] = d.h.r;
    h["singular_values"] = d.h.singular_values;
    v["U"] = d.v.u;
    v["V"] = d.v.v;
    v["r"] = d.v.r;
    v["singular_values"] = d.v.singular_values;
    out["h"] = h;
    out["v"] = v;
    out["rank_E"] = d.total_rank();
    return out;
  });

  m.def("read_model", &read_model, py::arg("path"));
  m.def("write_model", &write_model, py::arg("model"), py::arg("path"));

  m.def("build_heat_model",
        [](double dx, double dt, bool paper_rounding,
           const Eigen::RowVector2d& f_row) {
          HeatParams params;
          params.dx = dx;
          params.dt = dt;
          params.f_row = f_row;
          return build_heat_model(
              params, paper_rounding
                          ? CoefficientRounding::ThreeDecimalTruncation
                          : CoefficientRounding::Exact);
        },
        py::arg("dx"), py::arg("dt"), py::arg("paper_rounding") = false,
        py::arg("f_row") = Eigen::RowVector2d(0.1, 0.1));

  m.def("char_poly",
        [](const Roesser2D& model) { return char_poly(model).coeffs(); },
        py::arg("model"),
        "Coefficient matrix c[a, b] of z1^a * z2^b for "
        "det(E I(z1,z2) - A), by evaluation-interpolation");
  m.def("char_poly_oracle",
        [](const Roesser2D& model) { return char_poly_oracle(model).coeffs(); },
        py::arg("model"),
        "Same polynomial by exact cofactor expansion (n <= 6)");

  m.def("is_regular", &is_regular, py::arg("model"));
  m.def("is_causal", &is_causal, py::arg("model"));
  m.def("analyze",
        [](const Roesser2D& model, int samples) {
          return json_to_py(to_json(analyze(model, samples)));
        },
        py::arg("model"), py::arg("samples") = kDefaultSpectrumSamples);

  m.def("certify",
        [](const Roesser2D& model, const std::string& variant,
           bool force_solve, int max_iterations) {
          sdp::SolveOptions options;
          if (max_iterations > 0) options.max_iterations = max_iterations;
          const CertifyResult result = certify_stability(
              model, variant_from_name(variant), options, force_solve);
          nlohmann::json j;
          j["variant"] = variant;
          j["epsilon"] = result.problem.epsilon;
          j["outcome"] = to_json(result.outcome);
          j["certificate"] = result.certificate
                                 ? to_json(*result.certificate)
                                 : nlohmann::json(nullptr);
          j["structural_precheck"] =
              result.precheck ? nlohmann::json(result.precheck->message)
                              : nlohmann::json(nullptr);
          j["solver_ran"] = result.solver_ran;
          return json_to_py(j);
        },
        py::arg("model"), py::arg("variant"), py::arg("force_solve") = false,
        py::arg("max_iterations") = 0);

  m.def("check_stability_certificate",
        [](const Roesser2D& model, const std::string& variant,
           const Eigen::MatrixXd& p_h, const Eigen::MatrixXd& p_v) {
          const CertificateCheck check = check_stability_certificate(
              model, variant_from_name(variant), p_h, p_v);
          py::dict out;
          out["pass"] = check.pass;
          out["neg_max_eigenvalue"] = check.neg_max_eigenvalue;
          out["psd_min_eigenvalue"] = check.psd_min_eigenvalue;
          return out;
        },
        py::arg("model"), py::arg("variant"), py::arg("P_h"), py::arg("P_v"));

  m.def("lyapunov_delta", &lyapunov_delta, py::arg("E"), py::arg("A_eff"),
        py::arg("P"), py::arg("x"));

  m.def("verify_gain",
        [](const Roesser2D& model, const Eigen::MatrixXd& gain,
           const std::string& mode) {
          return json_to_py(
              to_json(verify_gain(model, gain, mode_from_name(mode))));
        },
        py::arg("model"), py::arg("gain"), py::arg("mode"));

  auto synthesis_to_py = [](const SynthesisOutcome& outcome) {
    nlohmann::json j;
    if (const auto* gain = std::get_if<GainResult>(&outcome)) {
      j["kind"] = "gain";
      j["K"] = matrix_to_json(gain->gain);
      j["recovery_residual"] = gain->recovery_residual;
      j["verification"] = to_json(gain->verification);
    } else if (const auto* infeasible =
                   std::get_if<SynthesisInfeasible>(&outcome)) {
      j["kind"] = "infeasible";
      j["outcome"] = to_json(sdp::SolveOutcome(infeasible->info));
    } else if (const auto* indeterminate =
                   std::get_if<SynthesisIndeterminate>(&outcome)) {
      j["kind"] = "indeterminate";
      j["outcome"] = to_json(sdp::SolveOutcome(indeterminate->info));
    } else {
      const auto& bad = std::get<RecoveryInconsistent>(outcome);
      j["kind"] = "recovery_inconsistent";
      j["message"] = bad.message;
      j["recovery_residual"] = bad.recovery_residual;
    }
    return json_to_py(j);
  };

  m.def("synthesize_state_feedback",
        [synthesis_to_py](const Roesser2D& model, const std::string& variant) {
          return synthesis_to_py(synthesize_state_feedback(
              model, variant_from_name(variant), {}));
        },
        py::arg("model"), py::arg("variant"));

  m.def("synthesize_output_feedback",
        [synthesis_to_py](const Roesser2D& model, const std::string& variant) {
          return synthesis_to_py(synthesize_output_feedback(
              model, variant_from_name(variant), {}));
        },
        py::arg("model"), py::arg("variant"));

  m.def("simulate",
        [](const Roesser2D& model, const std::string& mode,
           const Eigen::MatrixXd& gain, int n1, int n2,
           double boundary_value) {
          const ClosedLoopSpec loop = loop_from(mode, gain);
          const RankDecomposition d = rank_decompose(model);
          const BoundaryData boundary =
              BoundaryData::constant(d.h.r, d.v.r, boundary_value);
          return grid_to_py(simulate(model, loop, boundary, n1, n2));
        },
        py::arg("model"), py::arg("mode") = "open",
        py::arg("gain") = Eigen::MatrixXd(), py::arg("n1") = 50,
        py::arg("n2") = 50, py::arg("boundary_value") = 1.0);

  m.def("export_trajectory",
        [](const Roesser2D& model, const std::string& mode,
           const Eigen::MatrixXd& gain, int n1, int n2,
           double boundary_value, const std::string& path,
           const std::string& format) {
          const ClosedLoopSpec loop = loop_from(mode, gain);
          const RankDecomposition d = rank_decompose(model);
          const BoundaryData boundary =
              BoundaryData::constant(d.h.r, d.v.r, boundary_value);
          const TrajectoryGrid grid = simulate(model, loop, boundary, n1, n2);
          export_trajectory(grid, path,
                            format == "csv_heatmap"
                                ? TrajectoryFormat::CsvHeatmap
                                : TrajectoryFormat::CsvLong);
        },
        py::arg("model"), py::arg("mode"), py::arg("gain"), py::arg("n1"),
        py::arg("n2"), py::arg("boundary_value"), py::arg("path"),
        py::arg("format") = "csv_long");
}
