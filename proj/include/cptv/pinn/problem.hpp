#pragma once

#include "cptv/autodiff/tape.hpp"

#include <string>
#include <string_view>

namespace cptv::pinn {

using ad::Matrix;
using ad::Vector;

enum class PdeVariant {
  AdvectionDiffusion1D,  // inputs (x, t), output u
  NavierStokes2D,        // inputs (x, y, t), outputs (u, v, p)
};

std::string_view to_string(PdeVariant v);
PdeVariant parse_variant(std::string_view name);

// Which PDE to enforce and the space-time box it lives on. Time is always
// the last input coordinate.
struct PdeResidualSpec {
  PdeVariant variant = PdeVariant::AdvectionDiffusion1D;
  Vector lo;
  Vector hi;

  static PdeResidualSpec advection_diffusion(double x_lo, double x_hi, double horizon);
  static PdeResidualSpec navier_stokes(double x_lo, double x_hi, double y_lo, double y_hi, double horizon);

  [[nodiscard]] int input_dim() const;
  [[nodiscard]] int output_dim() const;
  [[nodiscard]] Eigen::Index time_row() const { return input_dim() - 1; }
  [[nodiscard]] double horizon() const { return hi(time_row()); }
  // Throws DomainError if any column of `points` leaves the box.
  void check_domain(const Matrix& points) const;
};

// Coordinates (dim x N) with observed values (targets x N). Target row r
// is compared against network output row r.
struct PointSet {
  Matrix coords;
  Matrix targets;

  [[nodiscard]] Eigen::Index size() const { return coords.cols(); }
  [[nodiscard]] bool empty() const { return coords.cols() == 0; }
  // Columns whose time coordinate lies in [t0, t1) (or [t0, t1] when closed).
  [[nodiscard]] PointSet select_time(double t0, double t1, bool closed) const;
  void append(const PointSet& other);
};

struct TrainingBatch {
  PointSet interior;
  PointSet boundary;
  PointSet initial;
  int index = 0;
  // Spatial slab [slab_lo, slab_hi) along the first coordinate.
  int slab = 0;
  double slab_lo = 0.0;
  double slab_hi = 0.0;
};

}  // namespace cptv::pinn
