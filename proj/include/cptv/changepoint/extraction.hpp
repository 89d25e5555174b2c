#pragma once

#include "cptv/changepoint/track.hpp"

#include <vector>

namespace cptv::cp {

struct Changepoint {
  double time = 0.0;
  double left = 0.0;   // lambda just before the jump
  double right = 0.0;  // lambda just after the jump
  [[nodiscard]] double jump() const { return right - left; }
};

struct ExtractionOptions {
  double threshold = 0.0;  // net jumps with magnitude above this are kept
  // Same-sign detected knots closer than dead_band knot spacings are merged into one
  // changepoint located at the largest jump of the group.
  double dead_band = 2.0;
};

// Default extraction threshold: `relative` times the larger of the track's
// range and its peak magnitude.
double default_threshold(const LambdaTrack& track, double relative = 0.05);

std::vector<Changepoint> extract_changepoints(const LambdaTrack& track, const ExtractionOptions& options);
std::vector<Changepoint> extract_changepoints(const LambdaTrack& track, double threshold);

}  // namespace cptv::cp
