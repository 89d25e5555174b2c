#pragma once

#include "cptv/autodiff/tape.hpp"
#include "cptv/changepoint/track.hpp"
#include "cptv/pinn/network.hpp"
#include "cptv/pinn/problem.hpp"

#include <vector>

namespace cptv::pinn {

// PDE residuals at a block of points, one (1 x N) node per equation:
//   advection-diffusion:  f = u_t + u_x - lambda(t) u_xx
//   Navier-Stokes:        f_u = u_t + u u_x + v u_y + p_x - lambda(t) (u_xx + u_yy)
//                         f_v = v_t + u v_x + v v_y + p_y - lambda(t) (v_xx + v_yy)
std::vector<ad::Var> residual_f(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                                const PdeResidualSpec& spec, const Matrix& points);

struct FittingOptions {
  // Adds the mean squared misfit on observed interior points.
  bool include_interior = true;
};

// Mean squared misfit on boundary and initial points, plus interior
// observations when enabled. Each non-empty set contributes its own mean.
ad::Var loss_fitting(ad::Tape& tape, const NetworkBinding& net, const TrainingBatch& batch,
                     const FittingOptions& options = {});

// Mean squared PDE residual over the interior points (summed over equations).
ad::Var loss_structure(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                       const PdeResidualSpec& spec, const TrainingBatch& batch);

struct BatchLosses {
  ad::Var fitting;
  ad::Var structure;
};

// Both losses from a single interior forward pass. Values agree with
// loss_fitting / loss_structure.
BatchLosses batch_losses(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                         const PdeResidualSpec& spec, const TrainingBatch& batch, const FittingOptions& options = {});

}  // namespace cptv::pinn
