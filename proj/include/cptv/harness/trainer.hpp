#pragma once

#include "cptv/changepoint/extraction.hpp"
#include "cptv/changepoint/refit.hpp"
#include "cptv/errors.hpp"
#include "cptv/harness/config.hpp"
#include "cptv/oco/regret.hpp"
#include "cptv/oco/weights.hpp"
#include "cptv/pinn/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cptv::harness {

using ad::Matrix;
using ad::Vector;

struct Metrics {
  double solution_mse = 0.0;           // jointly trained network on the reference grid
  std::optional<double> refit_mse;     // piecewise refit networks on the same grid
  std::vector<double> segment_lambda_error;  // |refit lambda - truth at segment midpoint|
  std::vector<double> changepoint_error;     // distance to the nearest true breakpoint
};

// Inner objective sampled during training, for loss-curve plots.
struct LossSample {
  int visit = 0;
  int step = 0;
  double loss = 0.0;
};

struct RunReport {
  pinn::PinnModel model;
  std::vector<cp::Changepoint> changepoints;
  double threshold = 0.0;
  std::vector<cp::SegmentFit> refits;
  oco::RegretRecord record;
  double regret = 0.0;
  double regret_bound = 0.0;
  double g = 0.0;
  long long updates = 0;
  std::optional<Metrics> metrics;
  std::vector<LossSample> loss_curve;
  double wall_seconds = 0.0;
  TrainConfig config;
};

// Raised when training produces non-finite values. Carries the model state
// from before the failing batch visit.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, pinn::PinnModel last_good)
      : NumericalError(what), last_good_(std::move(last_good)) {}
  [[nodiscard]] const pinn::PinnModel& last_good() const { return last_good_; }

 private:
  pinn::PinnModel last_good_;
};

using Logger = std::function<void(const std::string&)>;

pinn::PdeResidualSpec residual_spec(const TrainConfig& config);
pinn::PinnModel initial_model(const TrainConfig& config, const pinn::PdeResidualSpec& spec);

// Adam on the weighted loss of one batch; returns the final weighted loss.
optim::MinimizeResult inner_optimize(pinn::PinnModel& model, optim::Adam& adam, const pinn::PdeResidualSpec& spec,
                                     const pinn::TrainingBatch& batch, const std::array<double, 3>& weights,
                                     const TrainConfig& config);

// (L_f, L_s) on `batch` and the scaled penalty of the current track.
oco::LossVector measure_losses(const pinn::PinnModel& model, const pinn::PdeResidualSpec& spec,
                               const pinn::TrainingBatch& batch, const TrainConfig& config);

// Online weight-update training over spatial batches, followed by
// changepoint extraction and the optional per-segment refit.
RunReport train(const TrainConfig& config, const std::vector<pinn::TrainingBatch>& batches,
                const Logger& log = {});

// Grid metrics against a reference solution (advection-diffusion only).
Metrics evaluate(const RunReport& report, const ref::ReferenceSolution& reference);
double solution_mse(const pinn::NetworkParams& network, const ref::ReferenceSolution& reference);
// Squared error per grid node, (nt + 1) x nx.
Matrix squared_error_grid(const pinn::NetworkParams& network, const ref::ReferenceSolution& reference);

}  // namespace cptv::harness
