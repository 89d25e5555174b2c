#include "cptv/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace cptv::harness {

pinn::PdeResidualSpec residual_spec(const TrainConfig& config) {
  const ref::GridSpec& g = config.grid;
  if (config.problem.variant == pinn::PdeVariant::AdvectionDiffusion1D)
    return pinn::PdeResidualSpec::advection_diffusion(g.x_lo, g.x_hi, g.horizon);
  return pinn::PdeResidualSpec::navier_stokes(g.x_lo, g.x_hi, config.problem.y_lo, config.problem.y_hi, g.horizon);
}

pinn::PinnModel initial_model(const TrainConfig& config, const pinn::PdeResidualSpec& spec) {
  std::vector<int> widths{spec.input_dim()};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(spec.output_dim());
  std::mt19937_64 rng(config.seed);
  pinn::PinnModel model{pinn::NetworkParams::xavier(widths, pinn::InputMap::box(spec.lo, spec.hi), rng),
                        cp::LambdaTrack::uniform(spec.horizon(), config.track.knots, config.track.initial_base)};
  model.track.set_all_raw(config.track.initial_increment, config.track.initial_increment);
  model.track.set_weighting(config.track.weighting);
  return model;
}

namespace {

pinn::FittingOptions fitting_options(const TrainConfig& config) {
  return {config.problem.include_interior_data};
}

std::string describe(const oco::LossVector& l, const oco::SimplexWeights& w) {
  std::ostringstream s;
  s.precision(5);
  s << "batch " << l.batch << ": L_f=" << l.fitting << " L_s=" << l.structure << " V=" << l.tv << " -> w=("
    << w.w[0] << ", " << w.w[1] << ", " << w.w[2] << ")";
  return s.str();
}

}  // namespace

optim::MinimizeResult inner_optimize(pinn::PinnModel& model, optim::Adam& adam, const pinn::PdeResidualSpec& spec,
                                     const pinn::TrainingBatch& batch, const std::array<double, 3>& weights,
                                     const TrainConfig& config) {
  const pinn::FittingOptions opts = fitting_options(config);
  const double tv_scale = config.track.tv_scale;
  return optim::minimize(adam, [&](ad::Tape& tape) {
    return pinn::weighted_loss(tape, pinn::bind(tape, model), spec, batch, opts, tv_scale, weights);
  });
}

oco::LossVector measure_losses(const pinn::PinnModel& model, const pinn::PdeResidualSpec& spec,
                               const pinn::TrainingBatch& batch, const TrainConfig& config) {
  ad::Tape tape;
  const pinn::BoundModel bound = pinn::bind(tape, model);
  const pinn::LossChannels c =
      pinn::loss_channels(tape, bound, spec, batch, fitting_options(config), config.track.tv_scale);
  return {c.fitting.scalar(), c.structure.scalar(), c.tv.scalar(), batch.index};
}

RunReport train(const TrainConfig& config, const std::vector<pinn::TrainingBatch>& batches, const Logger& log) {
  const auto started = std::chrono::steady_clock::now();
  for (const std::string& w : config.validate())
    if (log) log("warning: " + w);
  if (batches.empty()) throw ConfigError("train: no batches");
  for (const auto& b : batches)
    if (b.interior.empty()) throw ConfigError("train: batch " + std::to_string(b.index) + " has no interior points");

  const pinn::PdeResidualSpec spec = residual_spec(config);
  RunReport report;
  report.config = config;
  report.model = initial_model(config, spec);
  pinn::PinnModel& model = report.model;

  optim::Adam adam(model.adam_params(config.track_step_scale, config.track.epsilon), config.optimizer);
  oco::SimplexWeights weights = oco::SimplexWeights::uniform(config.online.eta);
  weights.w = config.online.w0;

  int visit = 0;
  for (int epoch = 0; epoch < config.online.epochs; ++epoch) {
    for (std::size_t k = 0; k < batches.size(); ++k, ++visit) {
      const pinn::TrainingBatch& batch = batches[k];
      // Penalty of the track as it stood before this batch's optimization.
      const double tv_before = config.track.tv_scale * model.track.tv_value();
      pinn::PinnModel last_good = model;
      optim::MinimizeResult r;
      try {
        r = inner_optimize(model, adam, spec, batch, weights.w, config);
      } catch (const NumericalError& e) {
        throw DivergenceError("epoch " + std::to_string(epoch) + " batch " + std::to_string(k) + ": " + e.what(),
                              std::move(last_good));
      }
      for (std::size_t s = 0; s < r.history.size(); s += 100)
        report.loss_curve.push_back({visit, static_cast<int>(s), r.history[s]});

      oco::LossVector losses = measure_losses(model, spec, batch, config);
      losses.tv = tv_before;
      losses.batch = visit;
      try {
        losses.validate();
      } catch (const NumericalError& e) {
        throw DivergenceError(e.what(), std::move(last_good));
      }
      if (config.online.adaptive) weights = oco::update_weights(weights, losses, config.online.eta);
      report.record.push(losses, weights);
      if (log) log("epoch " + std::to_string(epoch) + " " + describe(losses, weights) +
                   " lambda(0)=" + std::to_string(model.track.base()));
    }
  }

  report.updates = static_cast<long long>(report.record.size());
  report.regret = oco::regret(report.record);
  report.g = report.record.max_l1();
  report.regret_bound = report.g > 0.0 ? oco::regret_bound(config.online.eta, report.updates, report.g) : 0.0;

  report.threshold = config.extraction.threshold.value_or(cp::default_threshold(model.track, config.extraction.relative));
  report.changepoints = cp::extract_changepoints(model.track, {report.threshold, config.extraction.dead_band});
  if (log) log("detected " + std::to_string(report.changepoints.size()) + " changepoints at threshold " +
               std::to_string(report.threshold));

  if (config.refit.enabled) {
    cp::RefitProblem problem{spec, batches, model.network, model.track, model.track.base(), config.refit.adam,
                             fitting_options(config)};
    report.refits = cp::refit_segments(problem, report.changepoints);
    if (log)
      for (const auto& f : report.refits)
        log("refit [" + std::to_string(f.start) + ", " + std::to_string(f.end) + "): lambda=" +
            (f.lambda ? std::to_string(*f.lambda) : std::string("n/a")));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

Matrix squared_error_grid(const pinn::NetworkParams& network, const ref::ReferenceSolution& reference) {
  const auto nt = reference.t.size();
  const auto nx = reference.x.size();
  Matrix inputs(2, nt * nx);
  for (Eigen::Index n = 0; n < nt; ++n)
    for (Eigen::Index i = 0; i < nx; ++i) inputs.col(n * nx + i) << reference.x(i), reference.t(n);
  const Matrix pred = pinn::predict(network, inputs);
  Matrix err(nt, nx);
  for (Eigen::Index n = 0; n < nt; ++n)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double d = pred(0, n * nx + i) - reference.u(n, i);
      err(n, i) = d * d;
    }
  return err;
}

double solution_mse(const pinn::NetworkParams& network, const ref::ReferenceSolution& reference) {
  return squared_error_grid(network, reference).mean();
}

Metrics evaluate(const RunReport& report, const ref::ReferenceSolution& reference) {
  Metrics m;
  m.solution_mse = solution_mse(report.model.network, reference);

  if (!report.refits.empty()) {
    bool complete = true;
    for (const auto& f : report.refits) complete = complete && f.network.has_value();
    if (complete) {
      const Eigen::Index nx = reference.x.size();
      double acc = 0.0;
      for (Eigen::Index n = 0; n < reference.t.size(); ++n) {
        const double t = reference.t(n);
        const cp::SegmentFit* seg = &report.refits.back();
        for (const auto& f : report.refits)
          if (t >= f.start && t < f.end) {
            seg = &f;
            break;
          }
        Matrix inputs(2, nx);
        for (Eigen::Index i = 0; i < nx; ++i) inputs.col(i) << reference.x(i), t;
        const Matrix pred = pinn::predict(*seg->network, inputs);
        acc += (pred.row(0).transpose() - reference.u.row(n).transpose()).squaredNorm();
      }
      m.refit_mse = acc / static_cast<double>(reference.u.size());
    }
    if (!reference.lambda.empty())
      for (const auto& f : report.refits)
        if (f.lambda) m.segment_lambda_error.push_back(std::abs(*f.lambda - reference.lambda_at(0.5 * (f.start + f.end))));
  }

  if (reference.lambda.size() > 1) {
    for (const auto& c : report.changepoints) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < reference.lambda.size(); ++i)
        best = std::min(best, std::abs(c.time - reference.lambda[i].start));
      m.changepoint_error.push_back(best);
    }
  }
  return m;
}

}  // namespace cptv::harness
