#pragma once

#include "cptv/changepoint/track.hpp"
#include "cptv/optim/adam.hpp"
#include "cptv/pinn/problem.hpp"
#include "cptv/reference/sampling.hpp"
#include "cptv/reference/solver.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cptv::harness {

struct ProblemSettings {
  pinn::PdeVariant variant = pinn::PdeVariant::AdvectionDiffusion1D;
  // Reference "t,x,u" file (advection-diffusion) or "t,x,y,u,v,p" samples
  // (Navier-Stokes). Empty: generate from the grid section.
  std::string data_path;
  ref::SampleCounts samples{1000, 100, 100};
  // Observed interior values enter the fitting loss.
  bool include_interior_data = true;
  // Navier-Stokes only: spatial box of the external samples.
  double y_lo = 0.0;
  double y_hi = 1.0;
};

struct TrackSettings {
  int knots = 100;
  double initial_base = 0.1;
  double initial_increment = 0.05;
  // Multiplies the edge-weighted total variation in the loss vector.
  double tv_scale = 1e-6;
  cp::EdgeWeighting weighting = cp::EdgeWeighting::SqrtHorizon;
  // Adam epsilon for the track tensors; absent: the optimizer's.
  std::optional<double> epsilon;
};

struct OnlineSettings {
  double eta = 1e-4;
  std::array<double, 3> w0{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  int batches = 4;
  int epochs = 40;
  // false keeps w0 fixed for the whole run.
  bool adaptive = true;
};

struct ExtractionSettings {
  std::optional<double> threshold;  // absent: relative * max(range, peak)
  double relative = 0.05;
  double dead_band = 2.0;
};

struct RefitSettings {
  bool enabled = true;
  optim::AdamSettings adam{1e-3, 0.9, 0.999, 1e-8, 3000, 1500, 0.5};
};

struct TrainConfig {
  ProblemSettings problem;
  ref::GridSpec grid;
  std::vector<int> hidden{20, 20, 20, 20};
  TrackSettings track;
  OnlineSettings online;
  // Short visits with one decay schedule over the whole run.
  optim::AdamSettings optimizer{1e-3, 0.9, 0.999, 1e-8, 500, 20000, 0.5, true};
  double track_step_scale = 1.0;
  ExtractionSettings extraction;
  RefitSettings refit;
  std::uint64_t seed = 1234;

  // Throws ConfigError for invalid values. Returns warnings for values that
  // are accepted but outside the tested range.
  std::vector<std::string> validate() const;
};

// Strict JSON mapping: unknown keys raise ConfigError.
TrainConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TrainConfig& c);
// Parse errors carry the offending line number.
TrainConfig load_config(const std::filesystem::path& path);
// Grid section only, for the generate subcommand.
ref::GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const ref::GridSpec& g);

}  // namespace cptv::harness
