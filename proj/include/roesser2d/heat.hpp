#pragma once

#include "roesser2d/model.hpp"

namespace roesser2d {

// Backward-difference discretization of the 1D transport/heat balance on a
// (space, time) grid, yielding a two-state singular Roesser model with one
// dynamic horizontal state and one algebraic vertical state.
struct HeatParams {
  double dx = 0.1;
  double dt = 0.1;
  Eigen::RowVector2d f_row{0.1, 0.1};
};

// Exact keeps the rational coefficients; ThreeDecimalTruncation substitutes
// the 3-decimal truncated values the reference case study prints (0.476 and
// 0.047 at dx = dt = 0.1), whose downstream numbers were computed from the
// truncated matrices.
enum class CoefficientRounding { Exact, ThreeDecimalTruncation };

// E = [[1,0],[0,0]], A = [[a,0],[-a,1]], B = [b,-b]^T with
// a = dt/(dx+dt+dx*dt) and b = a*dx; F is the params row.
Roesser2D build_heat_model(const HeatParams& params,
                           CoefficientRounding rounding =
                               CoefficientRounding::Exact);

}  // namespace roesser2d
