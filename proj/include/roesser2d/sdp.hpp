#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roesser2d/affine_constraint.hpp"

namespace roesser2d {
namespace sdp {

struct SolveOptions {
  int max_iterations = 50000;
  double tolerance = 1e-13;  // relative stall threshold
  double epsilon = 1e-6;     // NegDef strictness margin, usually from the problem
  bool deterministic = true; // single-threaded fixed-order arithmetic
};

struct Feasible {
  Eigen::VectorXd y;
  double margin = 0.0;   // min over NegDef constraints of -lambda_max
  double psd_min = 0.0;  // min over Psd constraints of lambda_min
  int iterations_used = 0;
};

struct Infeasible {
  double best_margin = 0.0;  // best feasibility deficiency reached (< 0)
  bool structural = false;
  std::optional<Eigen::VectorXd> structural_witness;
  std::string note;
};

struct Indeterminate {
  int iterations_used = 0;
  double best_margin = 0.0;
  std::string diagnostic;
};

using SolveOutcome = std::variant<Feasible, Infeasible, Indeterminate>;

// Optional external solver hook. Outcomes are re-verified with the
// independent eigenvalue routine before being returned to callers.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual SolveOutcome solve(const std::vector<AffineMatrixConstraint>& constraints,
                             int dimension, const SolveOptions& options) = 0;
  virtual std::string name() const = 0;
};

void register_backend(std::shared_ptr<Backend> backend);
void clear_backend();
std::shared_ptr<Backend> registered_backend();

// Margins of a candidate point under the independent eigenvalue routine.
struct MarginReport {
  double neg_margin = 0.0;  // min over NegDef of -lambda_max, +inf when none
  double psd_min = 0.0;     // min over Psd of lambda_min, +inf when none
};

MarginReport evaluate_margins(const std::vector<AffineMatrixConstraint>& constraints,
                              const Eigen::VectorXd& y);

// Feasibility search over the affine family. Default engine: alternating
// projections between the affine subspace and the product of shifted
// definiteness cones, with independent re-verification of every Feasible
// outcome. Deterministic across runs.
SolveOutcome solve_feasibility(const std::vector<AffineMatrixConstraint>& constraints,
                               int dimension, const SolveOptions& options = {});

}  // namespace sdp
}  // namespace roesser2d
