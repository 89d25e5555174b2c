#pragma once

#include "cptv/autodiff/tape.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace cptv::optim {

using ad::Matrix;

struct AdamSettings {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int steps = 5000;
  // The step size is multiplied by decay_factor every decay_every steps of a
  // minimize() call; 0 disables decay.
  int decay_every = 2000;
  double decay_factor = 0.5;
  // Count decay steps over the optimizer's lifetime instead of per call.
  bool global_decay = false;

  [[nodiscard]] double step_size_at(long long step) const;
  void validate() const;
};

// Adaptive-moment gradient descent over a set of tensors identified by slot.
// Moment estimates persist across minimize() calls.
class Adam {
 public:
  struct Param {
    ad::SlotId slot;
    Matrix* value = nullptr;
    double step_scale = 1.0;  // multiplies the step size for this tensor
    std::optional<double> epsilon;  // overrides AdamSettings::epsilon
    std::optional<double> lower_bound;  // entries are clamped here after each step
  };

  explicit Adam(std::vector<Param> params, AdamSettings settings = {});

  // One update with step size `lr`. Slots missing from `grads` are skipped.
  void step(const ad::GradientSet& grads, double lr);

  [[nodiscard]] const AdamSettings& settings() const { return settings_; }
  [[nodiscard]] const std::vector<Param>& params() const { return params_; }
  [[nodiscard]] long long steps_taken() const { return steps_taken_; }

 private:
  struct Moments {
    Matrix m;
    Matrix v;
    long long t = 0;
  };
  std::vector<Param> params_;
  AdamSettings settings_;
  std::map<ad::SlotId, Moments> state_;
  long long steps_taken_ = 0;
};

// Builds the scalar objective on a fresh tape from the current tensor values.
using Objective = std::function<ad::Var(ad::Tape&)>;

struct MinimizeResult {
  double final_loss = 0.0;  // objective after the last step
  int steps = 0;
  std::vector<double> history;  // objective before each step
};

// Runs settings.steps Adam steps. Throws NumericalError on a non-finite loss
// or gradient; the offending step is not applied.
MinimizeResult minimize(Adam& adam, const Objective& objective);

}  // namespace cptv::optim
