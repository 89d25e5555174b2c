#include "cptv/pinn/model.hpp"

namespace cptv::pinn {

std::vector<optim::Adam::Param> PinnModel::adam_params(double track_step_scale, std::optional<double> track_epsilon) {
  std::vector<optim::Adam::Param> out;
  const ad::SlotId base = network_slot();
  for (std::size_t l = 0; l < network.layer_count(); ++l) {
    out.push_back({NetworkBinding::weight_slot(base, l), &network.weights[l], 1.0, {}, {}});
    out.push_back({NetworkBinding::bias_slot(base, l), &network.biases[l], 1.0, {}, {}});
  }
  const ad::SlotId t = track_slot();
  out.push_back({cp::TrackBinding::base_slot(t), &track.mutable_base(), track_step_scale, track_epsilon, {}});
  if (track.knot_count() > 0) {
    out.push_back({cp::TrackBinding::up_slot(t), &track.mutable_up(), track_step_scale, track_epsilon, 0.0});
    out.push_back({cp::TrackBinding::down_slot(t), &track.mutable_down(), track_step_scale, track_epsilon, 0.0});
  }
  return out;
}

BoundModel bind(ad::Tape& tape, const PinnModel& model) {
  return {bind(tape, model.network, model.network_slot()), cp::bind(tape, model.track, model.track_slot())};
}

LossChannels loss_channels(ad::Tape& tape, const BoundModel& bound, const PdeResidualSpec& spec,
                           const TrainingBatch& batch, const FittingOptions& options, double tv_scale) {
  const BatchLosses l = batch_losses(tape, bound.network, bound.track, spec, batch, options);
  return {l.fitting, l.structure, tape.affine(cp::tv_penalty(tape, bound.track), tv_scale, 0.0)};
}

ad::Var weighted_loss(ad::Tape& tape, const BoundModel& bound, const PdeResidualSpec& spec,
                      const TrainingBatch& batch, const FittingOptions& options, double tv_scale,
                      const std::array<double, 3>& weights) {
  const LossChannels c = loss_channels(tape, bound, spec, batch, options, tv_scale);
  ad::Var total = tape.add(tape.affine(c.fitting, weights[0], 0.0), tape.affine(c.structure, weights[1], 0.0));
  if (weights[2] != 0.0) total = tape.add(total, tape.affine(c.tv, weights[2], 0.0));
  return total;
}

}  // namespace cptv::pinn
