#pragma once

// Online re-weighting of the three loss channels (fitting, structure, total
// variation) on the probability simplex.
//
// The weighted loss is linear in w, so its gradient is the loss vector and
// the entropy-regularized minimizer
//   argmin_w  <L, w> + (1/eta) <w, log w>
// is the normalized exponential w_i = exp(-eta L_i - (1 - eta gamma)) with
//   gamma = (1 - log sum_j exp(-eta L_j)) / eta.

#include <array>
#include <filesystem>
#include <vector>

namespace cptv::oco {

struct LossVector {
  double fitting = 0.0;
  double structure = 0.0;
  double tv = 0.0;
  int batch = 0;

  [[nodiscard]] std::array<double, 3> values() const { return {fitting, structure, tv}; }
  [[nodiscard]] double l1_norm() const;
  // Throws NumericalError unless all three entries are finite and >= 0.
  void validate() const;
};

struct SimplexWeights {
  std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double eta = 1e-4;
  double gamma = 0.0;

  static SimplexWeights uniform(double eta);
  [[nodiscard]] bool on_simplex(double tol = 1e-12) const;
  // max_i w_i - min_i w_i.
  [[nodiscard]] double spread() const;
};

// <L, w>.
double total_loss(const LossVector& losses, const SimplexWeights& weights);

// Closed-form weight update. The result depends only on the current losses;
// `previous` is accepted for interface stability and is not read.
SimplexWeights update_weights(const SimplexWeights& previous, const LossVector& losses, double eta);
SimplexWeights update_weights(const LossVector& losses, double eta);

// exp(-eta L_i - (1 - eta gamma)) for a given gamma.
std::array<double, 3> weights_from_gamma(const LossVector& losses, double eta, double gamma);

}  // namespace cptv::oco
