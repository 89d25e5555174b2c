#include "cptv/pinn/losses.hpp"

#include "cptv/autodiff/extended.hpp"
#include "cptv/errors.hpp"

namespace cptv::pinn {

namespace {

void check_arity(const NetworkBinding& net, const PdeResidualSpec& spec) {
  if (net.params->input_dim() != spec.input_dim() || net.params->output_dim() != spec.output_dim())
    throw ConfigError("network arity does not match PDE variant " + std::string(to_string(spec.variant)));
}

ad::DerivativeRequest residual_request(const PdeResidualSpec& spec) {
  if (spec.variant == PdeVariant::AdvectionDiffusion1D) return {{2, 1}};
  return {{2, 2, 1}};
}

std::vector<ad::Var> residuals_from(ad::Tape& tape, const ad::ExtendedEval& ev, const cp::TrackBinding& track,
                                    const PdeResidualSpec& spec, const Matrix& points) {
  const ad::Var lambda = cp::lambda_at(tape, track, points.row(spec.time_row()));
  if (spec.variant == PdeVariant::AdvectionDiffusion1D) {
    const ad::Var u_x = ev.first(0);
    const ad::Var u_t = ev.first(1);
    const ad::Var u_xx = ev.second(0);
    return {tape.sub(tape.add(u_t, u_x), tape.mul(lambda, u_xx))};
  }
  // Rows of the 3-wide output: u, v, p.
  const auto pick = [&tape](ad::Var v, Eigen::Index r) { return tape.row(v, r); };
  const ad::Var u = pick(ev.value, 0);
  const ad::Var v = pick(ev.value, 1);
  const ad::Var dx = ev.first(0);
  const ad::Var dy = ev.first(1);
  const ad::Var dt = ev.first(2);
  const ad::Var dxx = ev.second(0);
  const ad::Var dyy = ev.second(1);
  std::vector<ad::Var> out;
  for (Eigen::Index c = 0; c < 2; ++c) {
    const ad::Var transport = tape.add(tape.mul(u, pick(dx, c)), tape.mul(v, pick(dy, c)));
    const ad::Var pressure = pick(c == 0 ? dx : dy, 2);
    const ad::Var laplace = tape.add(pick(dxx, c), pick(dyy, c));
    out.push_back(tape.sub(tape.add(tape.add(pick(dt, c), transport), pressure), tape.mul(lambda, laplace)));
  }
  return out;
}

// (1/N) sum_i ||pred_i - target_i||^2 over the target rows.
ad::Var misfit(ad::Tape& tape, ad::Var pred, const Matrix& targets) {
  if (targets.rows() > pred.rows()) throw ConfigError("targets have more rows than network outputs");
  ad::Var total;
  for (Eigen::Index r = 0; r < targets.rows(); ++r) {
    const ad::Var p = pred.rows() == 1 ? pred : tape.row(pred, r);
    const ad::Var term = tape.mean_square(tape.sub(p, tape.constant(Matrix(targets.row(r)))));
    total = total.valid() ? tape.add(total, term) : term;
  }
  if (!total.valid()) throw ConfigError("point set carries no target rows");
  return total;
}

ad::Var sum_of(ad::Tape& tape, const std::vector<ad::Var>& terms) {
  ad::Var total = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) total = tape.add(total, terms[i]);
  return total;
}

// Boundary and initial misfits from one concatenated value-only pass.
std::vector<ad::Var> edge_misfits(ad::Tape& tape, const NetworkBinding& net, const TrainingBatch& batch) {
  std::vector<ad::Var> terms;
  if (batch.boundary.empty() && batch.initial.empty()) return terms;
  PointSet edges = batch.boundary;
  edges.append(batch.initial);
  const ad::Var pred = ad::forward_extended(tape, net, edges.coords, ad::DerivativeRequest::none(edges.coords.rows())).value;
  const Eigen::Index nb = batch.boundary.size();
  const Eigen::Index n0 = batch.initial.size();
  if (nb > 0) terms.push_back(misfit(tape, n0 > 0 ? tape.cols(pred, 0, nb) : pred, batch.boundary.targets));
  if (n0 > 0) terms.push_back(misfit(tape, nb > 0 ? tape.cols(pred, nb, n0) : pred, batch.initial.targets));
  return terms;
}

}  // namespace

std::vector<ad::Var> residual_f(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                                const PdeResidualSpec& spec, const Matrix& points) {
  check_arity(net, spec);
  spec.check_domain(points);
  const ad::ExtendedEval ev = ad::forward_extended(tape, net, points, residual_request(spec));
  return residuals_from(tape, ev, track, spec, points);
}

ad::Var loss_fitting(ad::Tape& tape, const NetworkBinding& net, const TrainingBatch& batch,
                     const FittingOptions& options) {
  std::vector<ad::Var> terms = edge_misfits(tape, net, batch);
  if (options.include_interior && !batch.interior.empty()) {
    const ad::Var pred = ad::forward_extended(tape, net, batch.interior.coords,
                                              ad::DerivativeRequest::none(batch.interior.coords.rows()))
                             .value;
    terms.push_back(misfit(tape, pred, batch.interior.targets));
  }
  if (terms.empty()) throw UsageError("loss_fitting: batch has no boundary, initial or observed points");
  return sum_of(tape, terms);
}

ad::Var loss_structure(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                       const PdeResidualSpec& spec, const TrainingBatch& batch) {
  if (batch.interior.empty()) throw UsageError("loss_structure: batch has no interior points");
  std::vector<ad::Var> f = residual_f(tape, net, track, spec, batch.interior.coords);
  std::vector<ad::Var> terms;
  for (const ad::Var& r : f) terms.push_back(tape.mean_square(r));
  return sum_of(tape, terms);
}

BatchLosses batch_losses(ad::Tape& tape, const NetworkBinding& net, const cp::TrackBinding& track,
                         const PdeResidualSpec& spec, const TrainingBatch& batch, const FittingOptions& options) {
  if (batch.interior.empty()) throw UsageError("batch_losses: batch has no interior points");
  check_arity(net, spec);
  spec.check_domain(batch.interior.coords);
  const ad::ExtendedEval ev = ad::forward_extended(tape, net, batch.interior.coords, residual_request(spec));
  std::vector<ad::Var> f = residuals_from(tape, ev, track, spec, batch.interior.coords);
  std::vector<ad::Var> s_terms;
  for (const ad::Var& r : f) s_terms.push_back(tape.mean_square(r));

  std::vector<ad::Var> f_terms = edge_misfits(tape, net, batch);
  if (options.include_interior) f_terms.push_back(misfit(tape, ev.value, batch.interior.targets));
  if (f_terms.empty()) throw UsageError("batch_losses: batch has no boundary, initial or observed points");
  return {sum_of(tape, f_terms), sum_of(tape, s_terms)};
}

}  // namespace cptv::pinn
