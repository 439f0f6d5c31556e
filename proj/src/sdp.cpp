#include "roesser2d/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "roesser2d/errors.hpp"
#include "roesser2d/sym_eigen.hpp"

namespace roesser2d {
namespace sdp {

namespace {

constexpr double kSearchBox = 1e6;  // Lyapunov LMIs are scale invariant
constexpr int kStallWindow = 25;

std::shared_ptr<Backend>& backend_slot() {
  static std::shared_ptr<Backend> slot;
  return slot;
}

void validate_problem(const std::vector<AffineMatrixConstraint>& constraints,
                      int dimension) {
  if (dimension < 0) throw BadProblem("negative decision dimension");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& c = constraints[k];
    const Eigen::Index s = c.g0.rows();
    auto check_sym = [&](const Eigen::MatrixXd& m, const char* what) {
      if (m.rows() != s || m.cols() != s) {
        std::ostringstream os;
        os << "constraint " << k << ": " << what << " has inconsistent shape";
        throw BadProblem(os.str());
      }
      const double scale = 1.0 + m.cwiseAbs().maxCoeff();
      if ((m - m.transpose()).cwiseAbs().maxCoeff() >
          kSymmetryTolerance * scale) {
        std::ostringstream os;
        os << "constraint " << k << ": " << what << " is not symmetric";
        throw BadProblem(os.str());
      }
    };
    check_sym(c.g0, "g0");
    if (static_cast<int>(c.coeff.size()) != dimension) {
      std::ostringstream os;
      os << "constraint " << k << ": expected " << dimension
         << " coefficient matrices, got " << c.coeff.size();
      throw BadProblem(os.str());
    }
    for (const auto& g : c.coeff) check_sym(g, "coefficient");
  }
}

// Frobenius-preserving vectorization of the upper triangle.
Eigen::Index svec_size(Eigen::Index s) { return s * (s + 1) / 2; }

void svec_into(const Eigen::MatrixXd& m, Eigen::Ref<Eigen::VectorXd> out) {
  const double root2 = std::sqrt(2.0);
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = r; c < m.cols(); ++c) {
      out(idx++) = r == c ? m(r, c) : root2 * 0.5 * (m(r, c) + m(c, r));
    }
  }
}

struct EngineState {
  std::vector<Eigen::MatrixXd> values;       // G_k(y)
  std::vector<Eigen::VectorXd> eigenvalues;  // ascending, engine-side solver
  std::vector<Eigen::MatrixXd> eigenvectors;
};

void evaluate_engine_side(const std::vector<AffineMatrixConstraint>& constraints,
                          const Eigen::VectorXd& y, EngineState& state) {
  state.values.resize(constraints.size());
  state.eigenvalues.resize(constraints.size());
  state.eigenvectors.resize(constraints.size());
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    state.values[k] = constraints[k].evaluate(y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.values[k]);
    state.eigenvalues[k] = eig.eigenvalues();
    state.eigenvectors[k] = eig.eigenvectors();
  }
}

// Feasibility deficiency: >= 0 exactly when every constraint is satisfied
// at the engine's acceptance thresholds.
double deficiency(const std::vector<AffineMatrixConstraint>& constraints,
                  const EngineState& state, double epsilon) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& ev = state.eigenvalues[k];
    if (ev.size() == 0) continue;
    const double value = constraints[k].sense == ConstraintSense::NegDef
                             ? -ev(ev.size() - 1) - epsilon
                             : ev(0) + kPsdTolerance;
    worst = std::min(worst, value);
  }
  return worst;
}

}  // namespace

void register_backend(std::shared_ptr<Backend> backend) {
  backend_slot() = std::move(backend);
}

void clear_backend() { backend_slot().reset(); }

std::shared_ptr<Backend> registered_backend() { return backend_slot(); }

MarginReport evaluate_margins(
    const std::vector<AffineMatrixConstraint>& constraints,
    const Eigen::VectorXd& y) {
  MarginReport report;
  report.neg_margin = std::numeric_limits<double>::infinity();
  report.psd_min = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    const Eigen::MatrixXd value = c.evaluate(y);
    if (value.size() == 0) continue;
    if (c.sense == ConstraintSense::NegDef) {
      report.neg_margin =
          std::min(report.neg_margin, -sym_max_eigenvalue(value));
    } else {
      report.psd_min = std::min(report.psd_min, sym_min_eigenvalue(value));
    }
  }
  return report;
}

namespace {

SolveOutcome run_alternating_projections(
    const std::vector<AffineMatrixConstraint>& constraints, int dimension,
    const SolveOptions& options) {
  const double epsilon = options.epsilon;

  // Stacked least-squares map from decision vector to all constraint
  // blocks, factored once.
  Eigen::Index total_rows = 0;
  for (const auto& c : constraints) total_rows += svec_size(c.dimension());
  Eigen::MatrixXd ls(total_rows, dimension);
  {
    Eigen::Index row = 0;
    for (const auto& c : constraints) {
      const Eigen::Index block = svec_size(c.dimension());
      for (int i = 0; i < dimension; ++i) {
        svec_into(c.coeff[static_cast<std::size_t>(i)],
                  ls.block(row, i, block, 1).col(0));
      }
      row += block;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> factor(ls);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(dimension);
  EngineState state;
  double best_deficiency = -std::numeric_limits<double>::infinity();
  int stall_count = 0;

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    evaluate_engine_side(constraints, y, state);
    const double current = deficiency(constraints, state, epsilon);
    best_deficiency = std::max(best_deficiency, current);

    if (current >= 0.0) {
      // Engine-side acceptance; confirm with the independent routine.
      const MarginReport verified = evaluate_margins(constraints, y);
      if (verified.neg_margin >= 0.5 * epsilon &&
          verified.psd_min >= -kPsdTolerance) {
        Feasible ok;
        ok.y = y;
        ok.margin = verified.neg_margin;
        ok.psd_min = verified.psd_min;
        ok.iterations_used = iteration;
        return ok;
      }
      Indeterminate doubt;
      doubt.iterations_used = iteration;
      doubt.best_margin = best_deficiency;
      doubt.diagnostic =
          "engine acceptance not confirmed by independent eigenvalue check";
      return doubt;
    }

    // Project each block onto its shifted cone, then back onto the affine
    // family. NegDef targets carry a 2*epsilon shift so the limit point has
    // strict margin.
    Eigen::VectorXd rhs(ls.rows());
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      const auto& c = constraints[k];
      const Eigen::Index s = c.dimension();
      Eigen::VectorXd clamped = state.eigenvalues[k];
      for (Eigen::Index j = 0; j < clamped.size(); ++j) {
        clamped(j) = c.sense == ConstraintSense::NegDef
                         ? std::min(clamped(j), -2.0 * epsilon)
                         : std::max(clamped(j), 0.0);
      }
      const Eigen::MatrixXd target = state.eigenvectors[k] *
                                     clamped.asDiagonal() *
                                     state.eigenvectors[k].transpose();
      svec_into(target - c.g0, rhs.segment(row, svec_size(s)));
      row += svec_size(s);
    }
    Eigen::VectorXd next = factor.solve(rhs);
    for (Eigen::Index i = 0; i < next.size(); ++i) {
      next(i) = std::clamp(next(i), -kSearchBox, kSearchBox);
    }

    const double step = (next - y).cwiseAbs().maxCoeff();
    if (step <= options.tolerance * (1.0 + y.cwiseAbs().maxCoeff())) {
      if (++stall_count >= kStallWindow) {
        Infeasible out;
        out.best_margin = best_deficiency;
        out.structural = false;
        out.note = "no feasible point found within budget (projection "
                   "iteration stalled)";
        return out;
      }
    } else {
      stall_count = 0;
    }
    y = next;
  }

  Indeterminate out;
  out.iterations_used = options.max_iterations;
  out.best_margin = best_deficiency;
  out.diagnostic = "iteration limit reached";
  return out;
}

}  // namespace

SolveOutcome solve_feasibility(
    const std::vector<AffineMatrixConstraint>& constraints, int dimension,
    const SolveOptions& options) {
  if (!(options.tolerance > 0.0) || !(options.epsilon > 0.0) ||
      options.max_iterations < 1) {
    throw BadProblem("solve options need tolerance > 0, epsilon > 0 and a "
                     "positive iteration budget");
  }
  validate_problem(constraints, dimension);

  if (constraints.empty()) {
    Feasible trivially;
    trivially.y = Eigen::VectorXd::Zero(dimension);
    trivially.margin = std::numeric_limits<double>::infinity();
    trivially.psd_min = std::numeric_limits<double>::infinity();
    return trivially;
  }

  if (auto backend = registered_backend()) {
    SolveOutcome outcome;
    try {
      outcome = backend->solve(constraints, dimension, options);
    } catch (const std::exception& ex) {
      throw BackendError(std::string("backend '") + backend->name() +
                         "' failed: " + ex.what());
    }
    if (auto* feasible = std::get_if<Feasible>(&outcome)) {
      const MarginReport verified =
          evaluate_margins(constraints, feasible->y);
      if (verified.neg_margin >= 0.5 * options.epsilon &&
          verified.psd_min >= -kPsdTolerance) {
        feasible->margin = verified.neg_margin;
        feasible->psd_min = verified.psd_min;
        return outcome;
      }
      Indeterminate doubt;
      doubt.best_margin =
          std::min(verified.neg_margin - options.epsilon,
                   verified.psd_min + kPsdTolerance);
      std::ostringstream os;
      os << "backend '" << backend->name()
         << "' reported a feasible point that fails independent "
            "verification (neg margin "
         << verified.neg_margin << ", psd min " << verified.psd_min << ")";
      doubt.diagnostic = os.str();
      return doubt;
    }
    return outcome;
  }

  if (dimension == 0) {
    // Constant constraints: nothing to search.
    const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(0);
    const MarginReport verified = evaluate_margins(constraints, y0);
    if (verified.neg_margin >= 0.5 * options.epsilon &&
        verified.psd_min >= -kPsdTolerance) {
      Feasible ok;
      ok.y = y0;
      ok.margin = verified.neg_margin;
      ok.psd_min = verified.psd_min;
      return ok;
    }
    Infeasible out;
    out.best_margin = std::min(verified.neg_margin - options.epsilon,
                               verified.psd_min + kPsdTolerance);
    out.note = "constraints are constant and violated";
    return out;
  }

  return run_alternating_projections(constraints, dimension, options);
}

}  // namespace sdp
}  // namespace roesser2d
