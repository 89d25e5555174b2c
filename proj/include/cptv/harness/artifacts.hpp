#pragma once

// On-disk forms of a run: model.json, report.json and the CSV side files.

#include "cptv/harness/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace cptv::harness {

nlohmann::json network_to_json(const pinn::NetworkParams& p);
pinn::NetworkParams network_from_json(const nlohmann::json& j);
nlohmann::json track_to_json(const cp::LambdaTrack& t);
cp::LambdaTrack track_from_json(const nlohmann::json& j);

// Everything needed to evaluate a trained run without retraining.
struct ModelFile {
  pinn::PinnModel model;
  std::vector<cp::Changepoint> changepoints;
  std::vector<cp::SegmentFit> refits;
};

nlohmann::json model_to_json(const ModelFile& m);
ModelFile model_from_json(const nlohmann::json& j);
void write_model(const ModelFile& m, const std::filesystem::path& path);
ModelFile read_model(const std::filesystem::path& path);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json report_to_json(const RunReport& r);

// "knot_time,lambda_right_value": the first row is t = 0 with the base value,
// then one row per knot with the value holding from that knot on.
void write_track_csv(const cp::LambdaTrack& track, const std::filesystem::path& path);
std::vector<cp::Segment> read_track_csv(const std::filesystem::path& path);

// "visit,step,loss".
void write_loss_curve_csv(const std::vector<LossSample>& curve, const std::filesystem::path& path);
// "t,x,sq_error" over the reference grid.
void write_mse_grid_csv(const Matrix& err, const ref::ReferenceSolution& reference, const std::filesystem::path& path);

// Writes report.json, model.json, lambda_track.csv, weights.csv and
// loss_curve.csv into `dir`, plus mse_grid.csv when a reference is given.
void write_run_artifacts(const RunReport& report, const std::filesystem::path& dir,
                         const ref::ReferenceSolution* reference = nullptr);

}  // namespace cptv::harness
