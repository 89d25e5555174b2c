#pragma once

// Crank-Nicolson reference solver (implicit start-up steps) for
//   u_t + u_x = lambda(t) u_xx + s(x, t)   on [x_lo, x_hi] x (0, T]
// with Dirichlet walls and piecewise-constant lambda(t).

#include "cptv/autodiff/tape.hpp"
#include "cptv/changepoint/track.hpp"

#include <functional>
#include <vector>

namespace cptv::ref {

using ad::Matrix;
using ad::Vector;

struct GridSpec {
  double x_lo = -1.0;
  double x_hi = 1.0;
  int nx = 401;          // grid points including both walls
  double horizon = 1.0;
  int nt = 600;          // time steps
  std::vector<cp::Segment> lambda{{0.0, 0.5}, {1.0 / 3.0, 0.05}, {2.0 / 3.0, 1.0}};

  [[nodiscard]] double dx() const { return (x_hi - x_lo) / (nx - 1); }
  [[nodiscard]] double dt() const { return horizon / nt; }
  // Validates sizes, positivity and breakpoint alignment.
  void validate() const;
};

// Initial state, wall values and optional source. Defaults give
// u(x, 0) = -sin(pi x), u = 0 on both walls, no source.
struct BoundaryData {
  std::function<double(double x)> initial;
  std::function<double(double t)> left;
  std::function<double(double t)> right;
  std::function<double(double x, double t, double lambda)> source;

  static BoundaryData standard();
};

struct ReferenceSolution {
  Vector x;                 // nx nodes
  Vector t;                 // nt + 1 times
  Matrix u;                 // (nt + 1) x nx, row = time level
  std::vector<cp::Segment> lambda;

  [[nodiscard]] double x_lo() const { return x(0); }
  [[nodiscard]] double x_hi() const { return x(x.size() - 1); }
  [[nodiscard]] double horizon() const { return t(t.size() - 1); }
  // Bilinear interpolation; exact at grid nodes. Throws DomainError outside.
  [[nodiscard]] double interpolate(double xq, double tq) const;
  [[nodiscard]] double lambda_at(double tq) const;
};

ReferenceSolution solve_advection_diffusion(const GridSpec& spec, const BoundaryData& data = BoundaryData::standard());

// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
// `upper[n-1]` are ignored.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs);

}  // namespace cptv::ref
