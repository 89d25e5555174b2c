#include "cptv/changepoint/extraction.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cptv::cp {

double default_threshold(const LambdaTrack& track, double relative) {
  if (!(relative > 0.0)) throw ConfigError("default_threshold: relative factor must be positive");
  const Vector levels = track.levels();
  const double range = levels.maxCoeff() - levels.minCoeff();
  const double peak = levels.cwiseAbs().maxCoeff();
  const double t = relative * std::max(range, peak);
  // A track that is identically zero still needs a positive threshold.
  return t > 0.0 ? t : relative;
}

std::vector<Changepoint> extract_changepoints(const LambdaTrack& track, const ExtractionOptions& options) {
  if (!(options.threshold > 0.0)) throw ConfigError("extract_changepoints: threshold must be positive");
  if (options.dead_band < 0.0) throw ConfigError("extract_changepoints: dead band must be >= 0");
  const auto& knots = track.knots();
  const Vector jumps = track.jumps();
  const Vector levels = track.levels();
  const double spacing = track.horizon() / static_cast<double>(knots.size() + 1);
  const double band = options.dead_band * spacing * (1.0 + 1e-9);

  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < knots.size(); ++i)
    if (std::abs(jumps(static_cast<Eigen::Index>(i))) > options.threshold) hits.push_back(i);

  std::vector<Changepoint> out;
  std::size_t g = 0;
  while (g < hits.size()) {
    std::size_t end = g;
    // Neighbouring jumps of the same sign are one smeared change.
    auto jump = [&](std::size_t h) { return jumps(static_cast<Eigen::Index>(hits[h])); };
    while (end + 1 < hits.size() && knots[hits[end + 1]] - knots[hits[end]] <= band &&
           (jump(end + 1) > 0.0) == (jump(end) > 0.0))
      ++end;
    std::size_t best = hits[g];
    for (std::size_t h = g; h <= end; ++h)
      if (std::abs(jumps(static_cast<Eigen::Index>(hits[h]))) > std::abs(jumps(static_cast<Eigen::Index>(best))))
        best = hits[h];
    // Knot i separates segment i (left) from segment i + 1 (right).
    out.push_back({knots[best], levels(static_cast<Eigen::Index>(hits[g])),
                   levels(static_cast<Eigen::Index>(hits[end]) + 1)});
    g = end + 1;
  }
  return out;
}

std::vector<Changepoint> extract_changepoints(const LambdaTrack& track, double threshold) {
  return extract_changepoints(track, ExtractionOptions{threshold, 2.0});
}

}  // namespace cptv::cp
