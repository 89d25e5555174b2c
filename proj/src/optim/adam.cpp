#include "cptv/optim/adam.hpp"

#include "cptv/errors.hpp"

#include <cmath>
#include <string>

namespace cptv::optim {

double AdamSettings::step_size_at(long long step) const {
  if (decay_every <= 0) return step_size;
  return step_size * std::pow(decay_factor, step / decay_every);
}

void AdamSettings::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("optimizer: step size must be positive");
  if (steps < 0) throw ConfigError("optimizer: step count must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("optimizer: betas must lie in [0, 1)");
  if (!(decay_factor > 0.0)) throw ConfigError("optimizer: decay factor must be positive");
}

Adam::Adam(std::vector<Param> params, AdamSettings settings) : params_(std::move(params)), settings_(settings) {
  settings_.validate();
  for (const Param& p : params_) {
    if (p.value == nullptr) throw UsageError("Adam: null parameter tensor");
    if (p.epsilon && !(*p.epsilon > 0.0)) throw ConfigError("Adam: epsilon must be positive");
  }
}

void Adam::step(const ad::GradientSet& grads, double lr) {
  for (const Param& p : params_) {
    if (!grads.contains(p.slot)) continue;
    const Matrix& g = grads.at(p.slot);
    Moments& s = state_[p.slot];
    if (s.t == 0) {
      s.m = Matrix::Zero(g.rows(), g.cols());
      s.v = Matrix::Zero(g.rows(), g.cols());
    }
    ++s.t;
    s.m = settings_.beta1 * s.m + (1.0 - settings_.beta1) * g;
    s.v = settings_.beta2 * s.v + (1.0 - settings_.beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(s.t));
    const double c2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(s.t));
    const double a = lr * p.step_scale / c1;
    p.value->array() -= a * s.m.array() / ((s.v.array() / c2).sqrt() + p.epsilon.value_or(settings_.epsilon));
    if (p.lower_bound) *p.value = p.value->cwiseMax(*p.lower_bound);
  }
  ++steps_taken_;
}

MinimizeResult minimize(Adam& adam, const Objective& objective) {
  MinimizeResult result;
  const AdamSettings& s = adam.settings();
  result.history.reserve(static_cast<std::size_t>(s.steps));
  for (int step = 0; step < s.steps; ++step) {
    ad::Tape tape;
    const ad::Var loss = objective(tape);
    const double value = loss.scalar();
    if (!std::isfinite(value)) throw NumericalError("optimizer: non-finite loss at step " + std::to_string(step));
    const ad::GradientSet grads = tape.backward(loss);
    if (!grads.all_finite()) throw NumericalError("optimizer: non-finite gradient at step " + std::to_string(step));
    result.history.push_back(value);
    adam.step(grads, s.step_size_at(s.global_decay ? adam.steps_taken() : step));
    ++result.steps;
  }
  ad::Tape tape;
  result.final_loss = objective(tape).scalar();
  return result;
}

}  // namespace cptv::optim
