#include "cptv/reference/solver.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cptv::ref {

void GridSpec::validate() const {
  if (nx < 3) throw ConfigError("GridSpec: nx must be >= 3");
  if (nt < 2) throw ConfigError("GridSpec: nt must be >= 2");
  if (!(x_hi > x_lo)) throw ConfigError("GridSpec: empty spatial domain");
  if (!(horizon > 0.0)) throw ConfigError("GridSpec: horizon must be positive");
  if (lambda.empty()) throw ConfigError("GridSpec: no lambda segments");
  if (lambda.front().start != 0.0) throw ConfigError("GridSpec: first lambda segment must start at 0");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const cp::Segment& s = lambda[i];
    if (!(s.value > 0.0)) throw ConfigError("GridSpec: lambda must be positive, got " + std::to_string(s.value));
    if (i > 0 && !(s.start > lambda[i - 1].start)) throw ConfigError("GridSpec: lambda segments must be increasing");
    if (!(s.start < horizon) && i > 0) throw ConfigError("GridSpec: lambda segment starts at or after T");
    const double steps = s.start / dt();
    if (std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps))
      throw ConfigError("GridSpec: lambda breakpoint " + std::to_string(s.start) + " is not on the time grid (nt = " +
                        std::to_string(nt) + ")");
  }
}

BoundaryData BoundaryData::standard() {
  BoundaryData d;
  d.initial = [](double x) { return -std::sin(std::numbers::pi * x); };
  d.left = [](double) { return 0.0; };
  d.right = [](double) { return 0.0; };
  return d;
}

double ReferenceSolution::interpolate(double xq, double tq) const {
  const double slack = 1e-12;
  if (!(xq >= x_lo() - slack && xq <= x_hi() + slack && tq >= -slack && tq <= horizon() + slack))
    throw DomainError("ReferenceSolution: (" + std::to_string(xq) + ", " + std::to_string(tq) + ") outside grid");
  const auto nx = x.size();
  const auto nt = t.size();
  const double hx = (x_hi() - x_lo()) / static_cast<double>(nx - 1);
  const double ht = horizon() / static_cast<double>(nt - 1);
  // Queries within rounding of a node return that node's value exactly.
  auto snap = [](double f) { return std::abs(f - std::round(f)) < 1e-9 ? std::round(f) : f; };
  const double fx = std::clamp(snap((xq - x_lo()) / hx), 0.0, static_cast<double>(nx - 1));
  const double ft = std::clamp(snap(tq / ht), 0.0, static_cast<double>(nt - 1));
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(fx), nx - 2);
  const auto n = std::min<Eigen::Index>(static_cast<Eigen::Index>(ft), nt - 2);
  const double ax = fx - static_cast<double>(i);
  const double at = ft - static_cast<double>(n);
  return (1 - at) * ((1 - ax) * u(n, i) + ax * u(n, i + 1)) + at * ((1 - ax) * u(n + 1, i) + ax * u(n + 1, i + 1));
}

double ReferenceSolution::lambda_at(double tq) const {
  double v = lambda.front().value;
  for (const cp::Segment& s : lambda)
    if (tq >= s.start) v = s.value;
  return v;
}

void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) throw ConfigError("solve_tridiagonal: size mismatch");
  std::vector<double> c(n);
  double denom = diag[0];
  if (denom == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
  c[0] = upper[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c[i - 1];
    if (denom == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    c[i] = upper[i] / denom;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

ReferenceSolution solve_advection_diffusion(const GridSpec& spec, const BoundaryData& data) {
  spec.validate();
  if (!data.initial || !data.left || !data.right) throw ConfigError("BoundaryData: initial and wall values required");

  const int nx = spec.nx;
  const int nt = spec.nt;
  const double h = spec.dx();
  const double k = spec.dt();

  ReferenceSolution sol;
  sol.lambda = spec.lambda;
  sol.x.resize(nx);
  sol.t.resize(nt + 1);
  for (int i = 0; i < nx; ++i) sol.x(i) = i == nx - 1 ? spec.x_hi : spec.x_lo + i * h;
  for (int n = 0; n <= nt; ++n) sol.t(n) = n == nt ? spec.horizon : n * k;
  sol.u.resize(nt + 1, nx);
  for (int i = 0; i < nx; ++i) sol.u(0, i) = data.initial(sol.x(i));
  sol.u(0, 0) = data.left(0.0);
  sol.u(0, nx - 1) = data.right(0.0);

  // Interior unknowns 1..nx-2. Spatial operator per node:
  //   L u_i = lo * u_{i-1} + di * u_i + up * u_{i+1}
  const std::size_t m = static_cast<std::size_t>(nx - 2);
  std::vector<double> lower(m), diag(m), upper(m), rhs(m), cur(m);

  // One theta-scheme step from cur at t0 over dt; cur holds the result.
  auto substep = [&](double t0, double dt, double theta, double lam) {
    const double t1 = t0 + dt;
    const double lo = lam / (h * h) + 1.0 / (2.0 * h);
    const double di = -2.0 * lam / (h * h);
    const double up = lam / (h * h) - 1.0 / (2.0 * h);
    const double ex = (1.0 - theta) * dt;
    const double im = theta * dt;
    for (std::size_t j = 0; j < m; ++j) {
      const int i = static_cast<int>(j) + 1;
      const double ul = j == 0 ? data.left(t0) : cur[j - 1];
      const double ur = j + 1 == m ? data.right(t0) : cur[j + 1];
      rhs[j] = cur[j] + ex * (lo * ul + di * cur[j] + up * ur);
      if (data.source) rhs[j] += ex * data.source(sol.x(i), t0, lam) + im * data.source(sol.x(i), t1, lam);
      lower[j] = -im * lo;
      diag[j] = 1.0 - im * di;
      upper[j] = -im * up;
    }
    rhs.front() += im * lo * data.left(t1);
    rhs.back() += im * up * data.right(t1);
    solve_tridiagonal(lower, diag, upper, rhs);
    cur.swap(rhs);
  };

  for (std::size_t j = 0; j < m; ++j) cur[j] = sol.u(0, static_cast<Eigen::Index>(j) + 1);
  double prev_lam = -1.0;
  for (int n = 0; n < nt; ++n) {
    const double t0 = sol.t(n);
    const double t1 = sol.t(n + 1);
    const double lam = sol.lambda_at(t0 + 1e-12 * k);
    // Two implicit half steps at t = 0 and after each jump in lambda.
    if (lam != prev_lam) {
      substep(t0, 0.5 * (t1 - t0), 1.0, lam);
      substep(t0 + 0.5 * (t1 - t0), 0.5 * (t1 - t0), 1.0, lam);
    } else {
      substep(t0, t1 - t0, 0.5, lam);
    }
    prev_lam = lam;

    sol.u(n + 1, 0) = data.left(t1);
    sol.u(n + 1, nx - 1) = data.right(t1);
    for (std::size_t j = 0; j < m; ++j) sol.u(n + 1, static_cast<Eigen::Index>(j) + 1) = cur[j];
    if (!sol.u.row(n + 1).allFinite()) throw NumericalError("solve_advection_diffusion: non-finite solution");
  }
  return sol;
}

}  // namespace cptv::ref
