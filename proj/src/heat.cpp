#include "roesser2d/heat.hpp"

#include <cmath>

namespace roesser2d {

namespace {

double truncate_3_decimals(double v) {
  return std::trunc(v * 1000.0) / 1000.0;
}

}  // namespace

Roesser2D build_heat_model(const HeatParams& params,
                           CoefficientRounding rounding) {
  if (!(params.dx > 0.0) || !(params.dt > 0.0) ||
      !std::isfinite(params.dx) || !std::isfinite(params.dt)) {
    throw InvalidParams("dx and dt must be finite and positive");
  }
  if (!params.f_row.allFinite()) {
    throw InvalidParams("output row must be finite");
  }

  const double denom = params.dx + params.dt + params.dx * params.dt;
  double a = params.dt / denom;
  double b = params.dx * params.dt / denom;
  if (rounding == CoefficientRounding::ThreeDecimalTruncation) {
    a = truncate_3_decimals(a);
    b = truncate_3_decimals(b);
  }

  Roesser2D model;
  model.dims = PartitionDims{1, 1, 1, 1};
  model.E.setZero(2, 2);
  model.E(0, 0) = 1.0;
  model.A.resize(2, 2);
  model.A << a, 0.0, -a, 1.0;
  model.B.resize(2, 1);
  model.B << b, -b;
  model.F = params.f_row;
  return model;
}

}  // namespace roesser2d
