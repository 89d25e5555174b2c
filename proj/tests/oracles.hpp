#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance runner.

#include "cptv/oco/regret.hpp"
#include "cptv/oco/weights.hpp"
#include "cptv/pinn/model.hpp"
#include "cptv/reference/solver.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace cptv::oracle {

double relative_error(double a, double b, double floor = 1e-3);

struct DiffReport {
  int cases = 0;
  double max_param_error = 0.0;  // parameter gradients against central differences
  double max_input_error = 0.0;  // first and second input-derivatives
  int ns_cases = 0;
};

// Random small networks (advection-diffusion and Navier-Stokes variants, a few
// knots on the track), random interior points. Every parameter gradient of the
// structure + fitting loss and every requested input-derivative is compared to
// central finite differences.
DiffReport differentiation_oracle(int cases, std::uint64_t seed);

// argmin over a step-`step` lattice of the closed simplex of
//   <L, w> + (1/eta) sum w_i log w_i.
std::array<double, 3> grid_minimize_weights(const oco::LossVector& l, double eta, double step = 1e-3);

// Best fixed weights by exhaustive lattice search.
double grid_best_fixed(const oco::RegretRecord& record, double step = 1e-3);

// Stream of B random loss vectors driven through update_weights at rate eta.
oco::RegretRecord random_stream(int batches, double eta, std::uint64_t seed, double scale = 1.0);

// Max-norm error of Crank-Nicolson against u = exp(-t) sin(pi x) with the
// matching source term, for each (nx, nt) pair.
std::vector<double> mms_errors(const std::vector<std::pair<int, int>>& grids, double lambda);

}  // namespace cptv::oracle
