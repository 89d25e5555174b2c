#include "cptv/changepoint/refit.hpp"

#include "cptv/errors.hpp"
#include "cptv/pinn/model.hpp"

#include <string>

namespace cptv::cp {

pinn::TrainingBatch gather_interval(const std::vector<pinn::TrainingBatch>& batches, double start, double end,
                                    bool closed) {
  pinn::TrainingBatch out;
  for (const auto& b : batches) {
    out.interior.append(b.interior.select_time(start, end, closed));
    out.boundary.append(b.boundary.select_time(start, end, closed));
    out.initial.append(b.initial.select_time(start, end, closed));
  }
  return out;
}

namespace {

double mean_over(const LambdaTrack& track, double start, double end) {
  constexpr int kSamples = 64;
  double acc = 0.0;
  for (int i = 0; i < kSamples; ++i) acc += track.value_at(start + (end - start) * (i + 0.5) / kSamples);
  return acc / kSamples;
}

}  // namespace

std::vector<SegmentFit> refit_segments(const RefitProblem& problem, const std::vector<Changepoint>& changepoints) {
  const double horizon = problem.spec.horizon();
  std::vector<double> edges{0.0};
  for (const Changepoint& c : changepoints) {
    if (!(c.time > edges.back()) || !(c.time < horizon))
      throw ConfigError("refit_segments: changepoints must be sorted inside (0, T)");
    edges.push_back(c.time);
  }
  edges.push_back(horizon);

  std::vector<SegmentFit> fits;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    SegmentFit fit;
    fit.start = edges[s];
    fit.end = edges[s + 1];
    const bool last = s + 2 == edges.size();
    const pinn::TrainingBatch data = gather_interval(problem.batches, fit.start, fit.end, last);
    fit.interior_points = static_cast<std::size_t>(data.interior.size());
    if (data.interior.empty()) {
      fits.push_back(std::move(fit));
      continue;
    }

    const double start_lambda =
        problem.estimate ? mean_over(*problem.estimate, fit.start, fit.end) : problem.fallback_lambda;
    pinn::PinnModel model{problem.initial_network, LambdaTrack(horizon, {}, start_lambda)};
    optim::Adam adam(model.adam_params(), problem.adam);
    const std::array<double, 3> weights{1.0, 1.0, 0.0};
    const optim::MinimizeResult r = optim::minimize(adam, [&](ad::Tape& tape) {
      return pinn::weighted_loss(tape, pinn::bind(tape, model), problem.spec, data, problem.fitting, 0.0, weights);
    });
    fit.lambda = model.track.base();
    fit.network = std::move(model.network);
    fit.final_loss = r.final_loss;
    fits.push_back(std::move(fit));
  }
  return fits;
}

}  // namespace cptv::cp
