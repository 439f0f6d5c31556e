#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roesser2d/model.hpp"

namespace roesser2d {

inline constexpr double kDivergenceThreshold = 1e9;
inline constexpr double kAlgebraicConditionLimit = 1e12;

// Boundary data for the dynamic (rank-supported) components only, in the
// decomposed coordinates of rank_decompose. Algebraic components are always
// computed from the constraints, never prescribed.
struct BoundaryData {
  std::function<Eigen::VectorXd(int)> h_boundary;  // j -> length r_h
  std::function<Eigen::VectorXd(int)> v_boundary;  // i -> length r_v

  static BoundaryData constant(int r_h, int r_v, double value = 1.0);
  static BoundaryData tabulated(std::vector<Eigen::VectorXd> h_values,
                                std::vector<Eigen::VectorXd> v_values);
};

// Pointwise elimination data: the system rewritten in decomposed
// coordinates with dynamic rows (driven by the recursion) separated from
// algebraic rows (solved at each grid point).
struct ReducedForm {
  RankDecomposition decomposition;
  Eigen::MatrixXd a_hat;  // U^T A_eff V
  Eigen::MatrixXd b_hat;  // U^T B
  Eigen::MatrixXd m_alg;  // algebraic rows x algebraic columns
  double m_alg_condition = 1.0;
  Eigen::MatrixXd a_eff;
  std::vector<int> dynamic_rows;     // row indices in decomposed order
  std::vector<int> algebraic_rows;
  std::vector<int> dynamic_cols;
  std::vector<int> algebraic_cols;
  Eigen::VectorXd inverse_scales;  // 1/sigma for the dynamic rows

  int q() const { return static_cast<int>(algebraic_rows.size()); }

  // Dynamic-state recursion after eliminating the algebraic components:
  // S^{-1} (A_dd - A_da M^{-1} A_ad); its eigenvalues are the reduced
  // poles reported for scalar-recursion cases.
  Eigen::MatrixXd reduced_dynamics() const;
};

ReducedForm reduce_pointwise(const Roesser2D& model,
                             const ClosedLoopSpec& loop);

struct TrajectoryGrid {
  int n1 = 0;
  int n2 = 0;
  PartitionDims dims;
  // Raster storage, index = j * n1 + i; entries beyond the truncation point
  // are empty when the sweep stopped early.
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> u;
  bool diverged = false;
  int truncated_i = -1;  // first point not computed (sweep order), -1 if none
  int truncated_j = -1;
  std::vector<double> sup_norm_per_antidiagonal;

  int index(int i, int j) const { return j * n1 + i; }
  bool has_point(int i, int j) const {
    return index(i, j) < static_cast<int>(x.size()) &&
           x[static_cast<std::size_t>(index(i, j))].size() > 0;
  }
};

using InputField = std::function<Eigen::VectorXd(int, int)>;

// Raster sweep (j outer, i inner) with pointwise algebraic elimination.
// u_field is only consulted in open mode; the sweep stops early once any
// state exceeds the divergence threshold.
TrajectoryGrid simulate(const Roesser2D& model, const ClosedLoopSpec& loop,
                        const BoundaryData& boundary, int n1, int n2,
                        const InputField* u_field = nullptr);

enum class TrajectoryFormat { CsvLong, CsvHeatmap };

// CsvLong: header i,j,xh_*,xv_*,y_*,u_* and one row per computed point in
// sweep order. CsvHeatmap: n1 lines of n2 comma-separated values of one
// scalar channel (default y_0; channel refers to the y vector index), with
// nan for points past a truncation. 17 significant digits everywhere.
void export_trajectory(const TrajectoryGrid& grid, const std::string& path,
                       TrajectoryFormat format, int heatmap_channel = 0);

// Sidecar JSON: {diverged, N1, N2, truncated_at}.
void write_trajectory_metadata(const TrajectoryGrid& grid,
                               const std::string& path);

}  // namespace roesser2d
