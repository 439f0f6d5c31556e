#include "roesser2d/simulate.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace roesser2d {

BoundaryData BoundaryData::constant(int r_h, int r_v, double value) {
  BoundaryData b;
  b.h_boundary = [r_h, value](int) {
    return Eigen::VectorXd::Constant(r_h, value).eval();
  };
  b.v_boundary = [r_v, value](int) {
    return Eigen::VectorXd::Constant(r_v, value).eval();
  };
  return b;
}

BoundaryData BoundaryData::tabulated(std::vector<Eigen::VectorXd> h_values,
                                     std::vector<Eigen::VectorXd> v_values) {
  BoundaryData b;
  b.h_boundary = [values = std::move(h_values)](int j) -> Eigen::VectorXd {
    if (j < 0 || j >= static_cast<int>(values.size())) {
      throw BoundaryDimensionMismatch(
          "tabulated horizontal boundary has no entry for j=" +
          std::to_string(j));
    }
    return values[static_cast<std::size_t>(j)];
  };
  b.v_boundary = [values = std::move(v_values)](int i) -> Eigen::VectorXd {
    if (i < 0 || i >= static_cast<int>(values.size())) {
      throw BoundaryDimensionMismatch(
          "tabulated vertical boundary has no entry for i=" +
          std::to_string(i));
    }
    return values[static_cast<std::size_t>(i)];
  };
  return b;
}

ReducedForm reduce_pointwise(const Roesser2D& model,
                             const ClosedLoopSpec& loop) {
  ensure_valid(model);
  ReducedForm out;
  out.a_eff = effective_dynamics(model, loop);
  out.decomposition = rank_decompose(model);

  const int n_h = model.dims.n_h;
  const int n_v = model.dims.n_v;
  const int n = n_h + n_v;
  const int r_h = out.decomposition.h.r;
  const int r_v = out.decomposition.v.r;

  Eigen::MatrixXd u_full = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd v_full = Eigen::MatrixXd::Zero(n, n);
  if (n_h > 0) {
    u_full.topLeftCorner(n_h, n_h) = out.decomposition.h.u;
    v_full.topLeftCorner(n_h, n_h) = out.decomposition.h.v;
  }
  if (n_v > 0) {
    u_full.bottomRightCorner(n_v, n_v) = out.decomposition.v.u;
    v_full.bottomRightCorner(n_v, n_v) = out.decomposition.v.v;
  }

  out.a_hat = u_full.transpose() * out.a_eff * v_full;
  out.b_hat = model.dims.m > 0
                  ? (u_full.transpose() * model.B).eval()
                  : Eigen::MatrixXd::Zero(n, 0).eval();

  for (int k = 0; k < n_h; ++k) {
    (k < r_h ? out.dynamic_rows : out.algebraic_rows).push_back(k);
    (k < r_h ? out.dynamic_cols : out.algebraic_cols).push_back(k);
  }
  for (int k = 0; k < n_v; ++k) {
    (k < r_v ? out.dynamic_rows : out.algebraic_rows).push_back(n_h + k);
    (k < r_v ? out.dynamic_cols : out.algebraic_cols).push_back(n_h + k);
  }

  out.inverse_scales.resize(static_cast<Eigen::Index>(out.dynamic_rows.size()));
  for (int k = 0; k < r_h; ++k) {
    out.inverse_scales(k) = 1.0 / out.decomposition.h.singular_values(k);
  }
  for (int k = 0; k < r_v; ++k) {
    out.inverse_scales(r_h + k) =
        1.0 / out.decomposition.v.singular_values(k);
  }

  const int q = static_cast<int>(out.algebraic_rows.size());
  out.m_alg.resize(q, q);
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      out.m_alg(r, c) = out.a_hat(out.algebraic_rows[static_cast<std::size_t>(r)],
                                  out.algebraic_cols[static_cast<std::size_t>(c)]);
    }
  }
  if (q > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.m_alg);
    const double sigma_max = svd.singularValues()(0);
    const double sigma_min = svd.singularValues()(q - 1);
    out.m_alg_condition = sigma_min > 0.0
                              ? sigma_max / sigma_min
                              : std::numeric_limits<double>::infinity();
    if (!(out.m_alg_condition <= kAlgebraicConditionLimit)) {
      std::ostringstream os;
      os << "algebraic states are not uniquely determined pointwise "
            "(condition estimate "
         << out.m_alg_condition << ")";
      throw NonCausalPointwise(os.str());
    }
  }
  return out;
}

Eigen::MatrixXd ReducedForm::reduced_dynamics() const {
  const int nd = static_cast<int>(dynamic_rows.size());
  const int q_ = q();
  Eigen::MatrixXd a_dd(nd, nd);
  Eigen::MatrixXd a_da(nd, q_);
  Eigen::MatrixXd a_ad(q_, nd);
  for (int r = 0; r < nd; ++r) {
    for (int c = 0; c < nd; ++c) {
      a_dd(r, c) = a_hat(dynamic_rows[static_cast<std::size_t>(r)],
                         dynamic_cols[static_cast<std::size_t>(c)]);
    }
    for (int c = 0; c < q_; ++c) {
      a_da(r, c) = a_hat(dynamic_rows[static_cast<std::size_t>(r)],
                         algebraic_cols[static_cast<std::size_t>(c)]);
    }
  }
  for (int r = 0; r < q_; ++r) {
    for (int c = 0; c < nd; ++c) {
      a_ad(r, c) = a_hat(algebraic_rows[static_cast<std::size_t>(r)],
                         dynamic_cols[static_cast<std::size_t>(c)]);
    }
  }
  Eigen::MatrixXd core = a_dd;
  if (q_ > 0) {
    core -= a_da * m_alg.partialPivLu().solve(a_ad);
  }
  return inverse_scales.asDiagonal() * core;
}

TrajectoryGrid simulate(const Roesser2D& model, const ClosedLoopSpec& loop,
                        const BoundaryData& boundary, int n1, int n2,
                        const InputField* u_field) {
  if (n1 < 1 || n2 < 1) {
    throw InvalidParams("grid extents must be at least 1x1");
  }
  if (u_field != nullptr && loop.mode != FeedbackMode::Open) {
    throw InvalidParams("an input field is only allowed in open-loop mode");
  }
  const ReducedForm reduced = reduce_pointwise(model, loop);

  const int n_h = model.dims.n_h;
  const int n_v = model.dims.n_v;
  const int m = model.dims.m;
  const int p = model.dims.p;
  const int r_h = reduced.decomposition.h.r;
  const int r_v = reduced.decomposition.v.r;
  const int q = reduced.q();
  const int nd = static_cast<int>(reduced.dynamic_rows.size());

  Eigen::PartialPivLU<Eigen::MatrixXd> alg_solver;
  if (q > 0) alg_solver.compute(reduced.m_alg);

  auto fetch_boundary = [](const std::function<Eigen::VectorXd(int)>& fn,
                           int arg, int expected, const char* which) {
    if (!fn) {
      throw BoundaryDimensionMismatch(std::string(which) +
                                      " boundary function is missing");
    }
    Eigen::VectorXd v = fn(arg);
    if (v.size() != expected) {
      std::ostringstream os;
      os << which << " boundary must have length " << expected << ", got "
         << v.size();
      throw BoundaryDimensionMismatch(os.str());
    }
    return v;
  };

  TrajectoryGrid grid;
  grid.n1 = n1;
  grid.n2 = n2;
  grid.dims = model.dims;
  grid.x.assign(static_cast<std::size_t>(n1) * n2, Eigen::VectorXd());
  grid.y.assign(static_cast<std::size_t>(n1) * n2, Eigen::VectorXd());
  grid.u.assign(static_cast<std::size_t>(n1) * n2, Eigen::VectorXd());
  grid.sup_norm_per_antidiagonal.assign(
      static_cast<std::size_t>(n1 + n2 - 1), 0.0);

  // Row buffers of dynamic components in decomposed coordinates.
  std::vector<Eigen::VectorXd> wh_row(static_cast<std::size_t>(n1) + 1);
  std::vector<Eigen::VectorXd> wv_row(static_cast<std::size_t>(n1));
  std::vector<Eigen::VectorXd> wv_next(static_cast<std::size_t>(n1));

  const Eigen::VectorXd zero_input = Eigen::VectorXd::Zero(m);

  for (int j = 0; j < n2 && !grid.diverged; ++j) {
    if (j == 0) {
      for (int i = 0; i < n1; ++i) {
        wv_row[static_cast<std::size_t>(i)] =
            fetch_boundary(boundary.v_boundary, i, r_v, "vertical");
      }
    } else {
      wv_row.swap(wv_next);
    }
    for (int i = 0; i < n1; ++i) {
      const Eigen::VectorXd wh_dyn =
          i == 0 ? fetch_boundary(boundary.h_boundary, j, r_h, "horizontal")
                 : wh_row[static_cast<std::size_t>(i)];
      const Eigen::VectorXd& wv_dyn = wv_row[static_cast<std::size_t>(i)];

      Eigen::VectorXd input = zero_input;
      if (u_field != nullptr) {
        input = (*u_field)(i, j);
        if (input.size() != m) {
          throw BoundaryDimensionMismatch(
              "input field must produce vectors of length " +
              std::to_string(m));
        }
      }

      // Stack dynamic components in decomposed-row order, solve for the
      // algebraic ones, reassemble the full decomposed state.
      Eigen::VectorXd w_dyn(nd);
      w_dyn.head(r_h) = wh_dyn;
      w_dyn.tail(r_v) = wv_dyn;

      Eigen::VectorXd w = Eigen::VectorXd::Zero(n_h + n_v);
      for (int k = 0; k < nd; ++k) {
        w(reduced.dynamic_cols[static_cast<std::size_t>(k)]) = w_dyn(k);
      }
      if (q > 0) {
        Eigen::VectorXd rhs(q);
        for (int r = 0; r < q; ++r) {
          const int row = reduced.algebraic_rows[static_cast<std::size_t>(r)];
          double acc = 0.0;
          for (int k = 0; k < nd; ++k) {
            acc += reduced.a_hat(
                       row, reduced.dynamic_cols[static_cast<std::size_t>(k)]) *
                   w_dyn(k);
          }
          if (m > 0) acc += reduced.b_hat.row(row).dot(input);
          rhs(r) = -acc;
        }
        const Eigen::VectorXd w_alg = alg_solver.solve(rhs);
        for (int r = 0; r < q; ++r) {
          w(reduced.algebraic_cols[static_cast<std::size_t>(r)]) = w_alg(r);
        }
      }

      Eigen::VectorXd x(n_h + n_v);
      if (n_h > 0) {
        x.head(n_h) = reduced.decomposition.h.v * w.head(n_h);
      }
      if (n_v > 0) {
        x.tail(n_v) = reduced.decomposition.v.v * w.tail(n_v);
      }

      const std::size_t idx = static_cast<std::size_t>(grid.index(i, j));
      grid.x[idx] = x;
      grid.y[idx] = p > 0 ? (model.F * x).eval() : Eigen::VectorXd();
      switch (loop.mode) {
        case FeedbackMode::Open:
          grid.u[idx] = input;
          break;
        case FeedbackMode::StateFeedback:
          grid.u[idx] = loop.gain * x;
          break;
        case FeedbackMode::OutputFeedback:
          grid.u[idx] = -loop.gain * model.F * x;
          break;
      }

      const double sup = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
      auto& anti = grid.sup_norm_per_antidiagonal[static_cast<std::size_t>(i + j)];
      anti = std::max(anti, sup);

      if (sup > kDivergenceThreshold) {
        grid.diverged = true;
        if (i + 1 < n1) {
          grid.truncated_i = i + 1;
          grid.truncated_j = j;
        } else if (j + 1 < n2) {
          grid.truncated_i = 0;
          grid.truncated_j = j + 1;
        }
        break;
      }

      // Advance the recursion: sigma_k * w_next = (A_hat w + B_hat u)_k on
      // the dynamic rows.
      Eigen::VectorXd wh_next(r_h);
      Eigen::VectorXd wv_step(r_v);
      for (int k = 0; k < nd; ++k) {
        const int row = reduced.dynamic_rows[static_cast<std::size_t>(k)];
        double acc = reduced.a_hat.row(row).dot(w);
        if (m > 0) acc += reduced.b_hat.row(row).dot(input);
        const double value = reduced.inverse_scales(k) * acc;
        if (k < r_h) {
          wh_next(k) = value;
        } else {
          wv_step(k - r_h) = value;
        }
      }
      if (i + 1 < n1) wh_row[static_cast<std::size_t>(i) + 1] = wh_next;
      if (j + 1 < n2) wv_next[static_cast<std::size_t>(i)] = wv_step;
    }
  }
  return grid;
}

namespace {

std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

void export_trajectory(const TrajectoryGrid& grid, const std::string& path,
                       TrajectoryFormat format, int heatmap_channel) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  if (format == TrajectoryFormat::CsvLong) {
    out << "i,j";
    for (int k = 0; k < grid.dims.n_h; ++k) out << ",xh_" << k;
    for (int k = 0; k < grid.dims.n_v; ++k) out << ",xv_" << k;
    for (int k = 0; k < grid.dims.p; ++k) out << ",y_" << k;
    for (int k = 0; k < grid.dims.m; ++k) out << ",u_" << k;
    out << "\n";
    for (int j = 0; j < grid.n2; ++j) {
      for (int i = 0; i < grid.n1; ++i) {
        if (!grid.has_point(i, j)) continue;
        const std::size_t idx = static_cast<std::size_t>(grid.index(i, j));
        out << i << "," << j;
        for (Eigen::Index k = 0; k < grid.x[idx].size(); ++k) {
          out << "," << format_value(grid.x[idx](k));
        }
        for (Eigen::Index k = 0; k < grid.y[idx].size(); ++k) {
          out << "," << format_value(grid.y[idx](k));
        }
        for (Eigen::Index k = 0; k < grid.u[idx].size(); ++k) {
          out << "," << format_value(grid.u[idx](k));
        }
        out << "\n";
      }
    }
  } else {
    // One line per i, one column per j.
    const bool from_y = grid.dims.p > 0;
    for (int i = 0; i < grid.n1; ++i) {
      for (int j = 0; j < grid.n2; ++j) {
        if (j > 0) out << ",";
        if (!grid.has_point(i, j)) {
          out << "nan";
          continue;
        }
        const std::size_t idx = static_cast<std::size_t>(grid.index(i, j));
        const Eigen::VectorXd& source = from_y ? grid.y[idx] : grid.x[idx];
        const int channel =
            std::clamp(heatmap_channel, 0, static_cast<int>(source.size()) - 1);
        out << format_value(source(channel));
      }
      out << "\n";
    }
  }
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

void write_trajectory_metadata(const TrajectoryGrid& grid,
                               const std::string& path) {
  nlohmann::json meta;
  meta["diverged"] = grid.diverged;
  meta["N1"] = grid.n1;
  meta["N2"] = grid.n2;
  if (grid.truncated_i >= 0) {
    meta["truncated_at"] = {grid.truncated_i, grid.truncated_j};
  } else {
    meta["truncated_at"] = nullptr;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << meta.dump(2) << "\n";
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

}  // namespace roesser2d
