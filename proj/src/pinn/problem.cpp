#include "cptv/pinn/problem.hpp"

#include "cptv/errors.hpp"

#include <string>
#include <vector>

namespace cptv::pinn {

std::string_view to_string(PdeVariant v) {
  switch (v) {
    case PdeVariant::AdvectionDiffusion1D:
      return "advection_diffusion_1d";
    case PdeVariant::NavierStokes2D:
      return "navier_stokes_2d";
  }
  return "unknown";
}

PdeVariant parse_variant(std::string_view name) {
  if (name == "advection_diffusion_1d") return PdeVariant::AdvectionDiffusion1D;
  if (name == "navier_stokes_2d") return PdeVariant::NavierStokes2D;
  throw ConfigError("unknown PDE variant '" + std::string(name) + "'");
}

PdeResidualSpec PdeResidualSpec::advection_diffusion(double x_lo, double x_hi, double horizon) {
  PdeResidualSpec s;
  s.variant = PdeVariant::AdvectionDiffusion1D;
  s.lo = Vector(2);
  s.hi = Vector(2);
  s.lo << x_lo, 0.0;
  s.hi << x_hi, horizon;
  return s;
}

PdeResidualSpec PdeResidualSpec::navier_stokes(double x_lo, double x_hi, double y_lo, double y_hi, double horizon) {
  PdeResidualSpec s;
  s.variant = PdeVariant::NavierStokes2D;
  s.lo = Vector(3);
  s.hi = Vector(3);
  s.lo << x_lo, y_lo, 0.0;
  s.hi << x_hi, y_hi, horizon;
  return s;
}

int PdeResidualSpec::input_dim() const { return variant == PdeVariant::AdvectionDiffusion1D ? 2 : 3; }

int PdeResidualSpec::output_dim() const { return variant == PdeVariant::AdvectionDiffusion1D ? 1 : 3; }

void PdeResidualSpec::check_domain(const Matrix& points) const {
  if (points.rows() != input_dim())
    throw ConfigError("PdeResidualSpec: points have " + std::to_string(points.rows()) + " coordinates, expected " +
                      std::to_string(input_dim()));
  constexpr double kSlack = 1e-12;
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
      const double v = points(j, c);
      const double span = hi(j) - lo(j);
      if (!(v >= lo(j) - kSlack * span && v <= hi(j) + kSlack * span))
        throw DomainError("point " + std::to_string(c) + " coordinate " + std::to_string(j) + " = " +
                          std::to_string(v) + " outside domain");
    }
  }
}

PointSet PointSet::select_time(double t0, double t1, bool closed) const {
  const Eigen::Index trow = coords.rows() - 1;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < coords.cols(); ++c) {
    const double t = coords(trow, c);
    if (t >= t0 && (t < t1 || (closed && t <= t1))) keep.push_back(c);
  }
  PointSet out;
  out.coords.resize(coords.rows(), static_cast<Eigen::Index>(keep.size()));
  out.targets.resize(targets.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.coords.col(static_cast<Eigen::Index>(i)) = coords.col(keep[i]);
    out.targets.col(static_cast<Eigen::Index>(i)) = targets.col(keep[i]);
  }
  return out;
}

void PointSet::append(const PointSet& other) {
  if (other.empty()) return;
  if (empty()) {
    *this = other;
    return;
  }
  if (other.coords.rows() != coords.rows() || other.targets.rows() != targets.rows())
    throw ConfigError("PointSet::append: shape mismatch");
  Matrix c(coords.rows(), coords.cols() + other.coords.cols());
  c << coords, other.coords;
  Matrix t(targets.rows(), targets.cols() + other.targets.cols());
  t << targets, other.targets;
  coords = std::move(c);
  targets = std::move(t);
}

}  // namespace cptv::pinn
