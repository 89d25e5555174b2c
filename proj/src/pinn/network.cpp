#include "cptv/pinn/network.hpp"

#include "cptv/errors.hpp"

#include <cmath>
#include <string>

namespace cptv::pinn {

InputMap InputMap::identity(Eigen::Index dim) {
  return {Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0)};
}

InputMap InputMap::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw ConfigError("InputMap: bound dimensions differ");
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (!(hi(j) > lo(j))) throw ConfigError("InputMap: empty interval on coordinate " + std::to_string(j));
  return {std::move(lo), std::move(hi)};
}

double InputMap::scale(Eigen::Index j) const { return 2.0 / (hi(j) - lo(j)); }

Matrix InputMap::apply(const Matrix& physical) const {
  if (physical.rows() != dim()) throw ConfigError("InputMap: input dimension mismatch");
  Matrix out(physical.rows(), physical.cols());
  for (Eigen::Index j = 0; j < dim(); ++j)
    out.row(j) = (scale(j) * (physical.row(j).array() - lo(j)) - 1.0).matrix();
  return out;
}

NetworkParams NetworkParams::zeros(std::vector<int> widths, InputMap map) {
  if (widths.size() < 2) throw ConfigError("NetworkParams: need at least input and output widths");
  NetworkParams p;
  p.widths = std::move(widths);
  p.input_map = std::move(map);
  for (std::size_t l = 0; l + 1 < p.widths.size(); ++l) {
    if (p.widths[l] <= 0 || p.widths[l + 1] <= 0) throw ConfigError("NetworkParams: widths must be positive");
    p.weights.push_back(Matrix::Zero(p.widths[l + 1], p.widths[l]));
    p.biases.push_back(Matrix::Zero(p.widths[l + 1], 1));
  }
  p.validate();
  return p;
}

NetworkParams NetworkParams::xavier(std::vector<int> widths, InputMap map, std::mt19937_64& rng) {
  NetworkParams p = zeros(std::move(widths), std::move(map));
  for (auto& w : p.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
  }
  return p;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

void NetworkParams::validate() const {
  if (widths.size() < 2) throw ConfigError("NetworkParams: need at least input and output widths");
  if (weights.size() + 1 != widths.size() || biases.size() != weights.size())
    throw ConfigError("NetworkParams: layer count does not match widths");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != widths[l + 1] || weights[l].cols() != widths[l])
      throw ConfigError("NetworkParams: weight " + std::to_string(l) + " has wrong shape");
    if (biases[l].rows() != widths[l + 1] || biases[l].cols() != 1)
      throw ConfigError("NetworkParams: bias " + std::to_string(l) + " has wrong size");
  }
  if (input_map.dim() != widths.front()) throw ConfigError("NetworkParams: input map dimension mismatch");
}

NetworkBinding bind(ad::Tape& tape, const NetworkParams& params, ad::SlotId base) {
  NetworkBinding b;
  b.params = &params;
  b.first_slot = base;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    b.weights.push_back(tape.parameter(NetworkBinding::weight_slot(base, l), params.weights[l]));
    b.biases.push_back(tape.parameter(NetworkBinding::bias_slot(base, l), params.biases[l]));
  }
  return b;
}

Matrix predict(const NetworkParams& params, const Matrix& inputs) {
  Matrix h = params.input_map.apply(inputs);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    Matrix a = (params.weights[l] * h).colwise() + params.biases[l].col(0);
    if (l + 1 < params.layer_count()) {
      h = a.array().tanh().matrix();
    } else {
      h = std::move(a);
    }
  }
  return h;
}

}  // namespace cptv::pinn
