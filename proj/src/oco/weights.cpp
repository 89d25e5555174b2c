#include "cptv/oco/weights.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cptv::oco {

double LossVector::l1_norm() const { return std::abs(fitting) + std::abs(structure) + std::abs(tv); }

void LossVector::validate() const {
  for (double v : values())
    if (!std::isfinite(v) || v < 0.0)
      throw NumericalError("loss vector at batch " + std::to_string(batch) + " has a non-finite or negative entry (" +
                           std::to_string(fitting) + ", " + std::to_string(structure) + ", " + std::to_string(tv) +
                           ")");
}

SimplexWeights SimplexWeights::uniform(double eta) {
  SimplexWeights s;
  s.eta = eta;
  return s;
}

bool SimplexWeights::on_simplex(double tol) const {
  double sum = 0.0;
  for (double v : w) {
    if (!(v > 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

double SimplexWeights::spread() const {
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo;
}

double total_loss(const LossVector& losses, const SimplexWeights& weights) {
  const auto l = losses.values();
  return l[0] * weights.w[0] + l[1] * weights.w[1] + l[2] * weights.w[2];
}

SimplexWeights update_weights(const SimplexWeights& /*previous*/, const LossVector& losses, double eta) {
  return update_weights(losses, eta);
}

SimplexWeights update_weights(const LossVector& losses, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("update_weights: eta must be positive and finite");
  const auto l = losses.values();
  for (double v : l)
    if (!std::isfinite(v))
      throw NumericalError("update_weights: non-finite loss at batch " + std::to_string(losses.batch));

  // log sum_j exp(-eta L_j), shifted by the largest exponent.
  std::array<double, 3> z{};
  for (std::size_t i = 0; i < 3; ++i) z[i] = -eta * l[i];
  const double zmax = *std::max_element(z.begin(), z.end());
  double acc = 0.0;
  for (double zi : z) acc += std::exp(zi - zmax);
  const double lse = zmax + std::log(acc);

  SimplexWeights out;
  out.eta = eta;
  out.gamma = (1.0 - lse) / eta;
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    out.w[i] = std::exp(z[i] - zmax) / acc;
    sum += out.w[i];
  }
  // exp underflows for loss gaps beyond ~700 / eta; keep weights strictly positive.
  for (double& wi : out.w) wi = std::max(wi / sum, std::numeric_limits<double>::min());
  return out;
}

std::array<double, 3> weights_from_gamma(const LossVector& losses, double eta, double gamma) {
  const auto l = losses.values();
  std::array<double, 3> w{};
  for (std::size_t i = 0; i < 3; ++i) w[i] = std::exp(-eta * l[i] - (1.0 - eta * gamma));
  return w;
}

}  // namespace cptv::oco
