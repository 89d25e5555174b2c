#pragma once

#include "cptv/changepoint/extraction.hpp"
#include "cptv/optim/adam.hpp"
#include "cptv/pinn/losses.hpp"
#include "cptv/pinn/network.hpp"
#include "cptv/pinn/problem.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cptv::cp {

struct RefitProblem {
  pinn::PdeResidualSpec spec;
  std::vector<pinn::TrainingBatch> batches;  // all training data
  // Starting network for every segment (typically the jointly trained one).
  pinn::NetworkParams initial_network;
  // Per-segment starting lambda is the track's mean over the segment.
  std::optional<LambdaTrack> estimate;
  double fallback_lambda = 0.1;
  optim::AdamSettings adam{1e-3, 0.9, 0.999, 1e-8, 3000, 1500, 0.5};
  pinn::FittingOptions fitting;
};

struct SegmentFit {
  double start = 0.0;
  double end = 0.0;
  std::size_t interior_points = 0;
  std::optional<double> lambda;  // absent when the interval holds no data
  std::optional<pinn::NetworkParams> network;
  double final_loss = 0.0;
};

// Standard single-coefficient fit on each interval between consecutive
// changepoints, with equal weights on fitting and structure losses.
std::vector<SegmentFit> refit_segments(const RefitProblem& problem, const std::vector<Changepoint>& changepoints);

// Data of all batches restricted to [start, end) ([start, end] when closed).
pinn::TrainingBatch gather_interval(const std::vector<pinn::TrainingBatch>& batches, double start, double end,
                                    bool closed);

}  // namespace cptv::cp
