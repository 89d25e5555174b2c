#pragma once

#include "cptv/autodiff/tape.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cptv::pinn {

using ad::Matrix;
using ad::Vector;

// Affine map of each input coordinate from [lo, hi] onto [-1, 1].
struct InputMap {
  Vector lo;
  Vector hi;

  static InputMap identity(Eigen::Index dim);
  static InputMap box(Vector lo, Vector hi);

  [[nodiscard]] Eigen::Index dim() const { return lo.size(); }
  // d(normalized)/d(physical) for coordinate j.
  [[nodiscard]] double scale(Eigen::Index j) const;
  // Maps a (dim x N) block of physical coordinates.
  [[nodiscard]] Matrix apply(const Matrix& physical) const;
};

// Fully connected tanh network with a linear output layer.
// widths.front() is the input dimension, widths.back() the output width.
struct NetworkParams {
  std::vector<int> widths;
  std::vector<Matrix> weights;  // weights[l] is widths[l+1] x widths[l]
  std::vector<Matrix> biases;   // biases[l] is widths[l+1] x 1
  InputMap input_map;

  static NetworkParams zeros(std::vector<int> widths, InputMap map);
  // Xavier-uniform weights, zero biases.
  static NetworkParams xavier(std::vector<int> widths, InputMap map, std::mt19937_64& rng);

  [[nodiscard]] std::size_t layer_count() const { return weights.size(); }
  [[nodiscard]] int input_dim() const { return widths.front(); }
  [[nodiscard]] int output_dim() const { return widths.back(); }
  // Number of tape slots the network occupies (two per layer).
  [[nodiscard]] std::uint32_t slot_count() const { return static_cast<std::uint32_t>(2 * weights.size()); }
  [[nodiscard]] std::size_t parameter_count() const;

  // Throws ConfigError when widths and tensors disagree.
  void validate() const;
};

// The network's tensors recorded as parameter leaves on one tape.
struct NetworkBinding {
  const NetworkParams* params = nullptr;
  std::vector<ad::Var> weights;
  std::vector<ad::Var> biases;
  ad::SlotId first_slot;

  [[nodiscard]] static ad::SlotId weight_slot(ad::SlotId base, std::size_t layer) {
    return {base.value + static_cast<std::uint32_t>(2 * layer)};
  }
  [[nodiscard]] static ad::SlotId bias_slot(ad::SlotId base, std::size_t layer) {
    return {base.value + static_cast<std::uint32_t>(2 * layer + 1)};
  }
};

NetworkBinding bind(ad::Tape& tape, const NetworkParams& params, ad::SlotId base);
// The binding keeps a pointer to the parameters.
NetworkBinding bind(ad::Tape& tape, NetworkParams&& params, ad::SlotId base) = delete;

// Plain evaluation without derivatives: returns an (output_dim x N) block.
Matrix predict(const NetworkParams& params, const Matrix& inputs);

}  // namespace cptv::pinn
