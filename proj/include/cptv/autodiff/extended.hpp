#pragma once

// Forward propagation of input-derivative tuples through a tanh network.
//
// For each requested input coordinate j the engine carries, per layer, the
// activation h, its first derivative dh/dx_j and (when asked) the diagonal
// second derivative d2h/dx_j2. With a = W h + b and s = tanh(a):
//   ds/dx   = s' * da/dx
//   d2s/dx2 = s' * d2a/dx2 + s'' * (da/dx)^2,   s' = 1 - s^2,  s'' = -2 s s'.
// Every quantity is a tape node, so any loss built from them can be
// differentiated with respect to the weights.

#include "cptv/autodiff/tape.hpp"
#include "cptv/pinn/network.hpp"

#include <vector>

namespace cptv::ad {

// Derivative order requested per input coordinate: 0, 1 or 2.
struct DerivativeRequest {
  std::vector<int> order;

  static DerivativeRequest none(std::size_t dim) { return {std::vector<int>(dim, 0)}; }
};

// Network output and its input-derivatives for a block of N points.
// Each valid entry is an (output_dim x N) node.
struct ExtendedEval {
  Var value;
  std::vector<Var> d_in;   // d_in[j] valid when order[j] >= 1
  std::vector<Var> d2_in;  // d2_in[j] valid when order[j] == 2

  [[nodiscard]] Var first(std::size_t j) const;
  [[nodiscard]] Var second(std::size_t j) const;
};

// `inputs` holds physical coordinates, one point per column. Derivatives are
// with respect to the physical coordinates (the input map is chain-ruled).
ExtendedEval forward_extended(Tape& tape, const pinn::NetworkBinding& net, const Matrix& inputs,
                              const DerivativeRequest& request);

}  // namespace cptv::ad
