#include "cptv/autodiff/extended.hpp"

#include "cptv/errors.hpp"

#include <string>

namespace cptv::ad {

Var ExtendedEval::first(std::size_t j) const {
  if (j >= d_in.size() || !d_in[j].valid()) throw UsageError("ExtendedEval: first derivative " + std::to_string(j) + " not requested");
  return d_in[j];
}

Var ExtendedEval::second(std::size_t j) const {
  if (j >= d2_in.size() || !d2_in[j].valid())
    throw UsageError("ExtendedEval: second derivative " + std::to_string(j) + " not requested");
  return d2_in[j];
}

ExtendedEval forward_extended(Tape& tape, const pinn::NetworkBinding& net, const Matrix& inputs,
                              const DerivativeRequest& request) {
  const pinn::NetworkParams& params = *net.params;
  const auto dim = static_cast<std::size_t>(params.input_dim());
  if (inputs.rows() != params.input_dim())
    throw ConfigError("forward_extended: input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                      std::to_string(params.input_dim()));
  if (request.order.size() != dim) throw ConfigError("forward_extended: derivative request size mismatch");
  for (int o : request.order) {
    if (o < 0) throw ConfigError("forward_extended: negative derivative order");
    if (o > 2) throw UnsupportedOrderError("forward_extended: derivative order " + std::to_string(o) + " > 2");
  }

  const Eigen::Index n = inputs.cols();
  Var h = tape.constant(params.input_map.apply(inputs));
  std::vector<Var> dh(dim);
  std::vector<Var> d2h(dim);  // invalid entries stand for identically zero
  bool any_first = false;
  bool any_second = false;
  for (std::size_t j = 0; j < dim; ++j) {
    if (request.order[j] == 0) continue;
    any_first = true;
    any_second = any_second || request.order[j] == 2;
    Matrix seed = Matrix::Zero(static_cast<Eigen::Index>(dim), n);
    seed.row(static_cast<Eigen::Index>(j)).setConstant(params.input_map.scale(static_cast<Eigen::Index>(j)));
    dh[j] = tape.constant(std::move(seed));
  }

  const std::size_t layers = params.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const Var w = net.weights[l];
    Var a = tape.add_bias(tape.matmul(w, h), net.biases[l]);
    std::vector<Var> da(dim);
    std::vector<Var> d2a(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!dh[j].valid()) continue;
      da[j] = tape.matmul(w, dh[j]);
      if (d2h[j].valid()) d2a[j] = tape.matmul(w, d2h[j]);
    }
    if (l + 1 == layers) {
      h = a;
      dh = std::move(da);
      d2h = std::move(d2a);
      break;
    }

    h = tape.tanh(a);
    if (!any_first) continue;
    const Var s1 = tape.affine(tape.square(h), -1.0, 1.0);
    Var s2;
    if (any_second) s2 = tape.affine(tape.mul(h, s1), -2.0, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!da[j].valid()) continue;
      dh[j] = tape.mul(s1, da[j]);
      if (request.order[j] == 2) {
        const Var curvature = tape.mul(s2, tape.square(da[j]));
        d2h[j] = d2a[j].valid() ? tape.add(tape.mul(s1, d2a[j]), curvature) : curvature;
      }
    }
  }

  ExtendedEval out;
  out.value = h;
  out.d_in.resize(dim);
  out.d2_in.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    if (request.order[j] >= 1) out.d_in[j] = dh[j];
    if (request.order[j] == 2) {
      // Without hidden layers the map is affine and the curvature is zero.
      out.d2_in[j] = d2h[j].valid() ? d2h[j] : tape.constant(Matrix::Zero(params.output_dim(), n));
    }
  }
  return out;
}

}  // namespace cptv::ad
