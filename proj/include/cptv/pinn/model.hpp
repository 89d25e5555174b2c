#pragma once

#include "cptv/changepoint/track.hpp"
#include "cptv/optim/adam.hpp"
#include "cptv/pinn/losses.hpp"
#include "cptv/pinn/network.hpp"
#include "cptv/pinn/problem.hpp"

#include <array>
#include <optional>

namespace cptv::pinn {

// Network and coefficient track trained together. The network occupies the
// first slots, the track the three after it.
struct PinnModel {
  NetworkParams network;
  cp::LambdaTrack track;

  [[nodiscard]] ad::SlotId network_slot() const { return {0}; }
  [[nodiscard]] ad::SlotId track_slot() const { return {network.slot_count()}; }
  // Every trainable tensor. The track tensors take their own step scale and,
  // when given, their own Adam epsilon.
  std::vector<optim::Adam::Param> adam_params(double track_step_scale = 1.0,
                                              std::optional<double> track_epsilon = {});
};

struct BoundModel {
  NetworkBinding network;
  cp::TrackBinding track;
};

BoundModel bind(ad::Tape& tape, const PinnModel& model);
BoundModel bind(ad::Tape& tape, PinnModel&& model) = delete;

struct LossChannels {
  ad::Var fitting;
  ad::Var structure;
  ad::Var tv;  // tv_scale * tv_penalty
};

LossChannels loss_channels(ad::Tape& tape, const BoundModel& bound, const PdeResidualSpec& spec,
                           const TrainingBatch& batch, const FittingOptions& options, double tv_scale);

// w[0] * L_f + w[1] * L_s + w[2] * tv_scale * V.
ad::Var weighted_loss(ad::Tape& tape, const BoundModel& bound, const PdeResidualSpec& spec,
                      const TrainingBatch& batch, const FittingOptions& options, double tv_scale,
                      const std::array<double, 3>& weights);

}  // namespace cptv::pinn
