#include "cptv/changepoint/track.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cptv::cp {

LambdaTrack::LambdaTrack(double horizon, std::vector<double> knots, double base)
    : horizon_(horizon), knots_(std::move(knots)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ConfigError("LambdaTrack: horizon must be positive");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i] > 0.0) || !(knots_[i] < horizon_))
      throw ConfigError("LambdaTrack: knot " + std::to_string(knots_[i]) + " outside (0, T)");
    if (i > 0 && !(knots_[i] > knots_[i - 1])) throw ConfigError("LambdaTrack: knots must be strictly increasing");
  }
  base_(0, 0) = base;
  const auto k = static_cast<Eigen::Index>(knots_.size());
  up_ = Matrix::Zero(k, 1);
  down_ = Matrix::Zero(k, 1);
}

LambdaTrack LambdaTrack::uniform(double horizon, int count, double base) {
  if (count < 0) throw ConfigError("LambdaTrack: negative knot count");
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) knots.push_back(horizon * i / (count + 1));
  return {horizon, std::move(knots), base};
}

LambdaTrack LambdaTrack::from_segments(double horizon, const std::vector<Segment>& segments) {
  if (segments.empty()) throw ConfigError("LambdaTrack: no segments");
  if (segments.front().start != 0.0) throw ConfigError("LambdaTrack: first segment must start at 0");
  std::vector<double> knots;
  for (std::size_t i = 1; i < segments.size(); ++i) knots.push_back(segments[i].start);
  LambdaTrack track(horizon, std::move(knots), segments.front().value);
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const double jump = segments[i].value - segments[i - 1].value;
    track.set_raw(i - 1, std::max(jump, 0.0), std::max(-jump, 0.0));
  }
  return track;
}

void LambdaTrack::set_raw(std::size_t knot, double up, double down) {
  if (knot >= knots_.size()) throw ConfigError("LambdaTrack: knot index out of range");
  up_(static_cast<Eigen::Index>(knot), 0) = up;
  down_(static_cast<Eigen::Index>(knot), 0) = down;
}

void LambdaTrack::set_all_raw(double up, double down) {
  up_.setConstant(up);
  down_.setConstant(down);
}

Vector LambdaTrack::effective_up() const { return up_.col(0).cwiseMax(0.0); }
Vector LambdaTrack::effective_down() const { return down_.col(0).cwiseMax(0.0); }
Vector LambdaTrack::jumps() const { return effective_up() - effective_down(); }

Vector LambdaTrack::levels() const {
  const Vector j = jumps();
  Vector out(j.size() + 1);
  out(0) = base();
  for (Eigen::Index i = 0; i < j.size(); ++i) out(i + 1) = out(i) + j(i);
  return out;
}

std::int32_t LambdaTrack::segment_of(double t) const {
  return static_cast<std::int32_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());
}

void LambdaTrack::check_time(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) throw DomainError("LambdaTrack: time " + std::to_string(t) + " outside [0, T]");
}

double LambdaTrack::value_at(double t) const {
  check_time(t);
  return levels()(segment_of(t));
}

double LambdaTrack::edge_weight(double t) const {
  if (!(t >= 0.0 && t < horizon_)) throw DomainError("edge_weight: time outside [0, T)");
  const double w = std::sqrt(horizon_ / (horizon_ - t));
  if (weighting_ == EdgeWeighting::UShape) {
    if (!(t > 0.0)) throw DomainError("edge_weight: U-shape weighting undefined at t = 0");
    return w + std::sqrt(horizon_ / t);
  }
  return w;
}

Vector LambdaTrack::edge_weights() const {
  Vector w(static_cast<Eigen::Index>(knots_.size()));
  for (std::size_t i = 0; i < knots_.size(); ++i) w(static_cast<Eigen::Index>(i)) = edge_weight(knots_[i]);
  return w;
}

double LambdaTrack::tv_value() const { return edge_weights().dot(effective_up() + effective_down()); }

TrackBinding bind(ad::Tape& tape, const LambdaTrack& track, ad::SlotId first) {
  TrackBinding b;
  b.track = &track;
  b.first_slot = first;
  b.base = tape.parameter(TrackBinding::base_slot(first), track.base_tensor());
  b.raw_up = tape.parameter(TrackBinding::up_slot(first), track.raw_up());
  b.raw_down = tape.parameter(TrackBinding::down_slot(first), track.raw_down());
  return b;
}

namespace {

ad::Var net_increments(ad::Tape& tape, const TrackBinding& b) {
  return tape.sub(tape.relu(b.raw_up), tape.relu(b.raw_down));
}

}  // namespace

ad::Var lambda_at(ad::Tape& tape, const TrackBinding& b, double t) {
  Eigen::RowVectorXd times(1);
  times(0) = t;
  return lambda_at(tape, b, times);
}

ad::Var lambda_at(ad::Tape& tape, const TrackBinding& b, const Eigen::RowVectorXd& times) {
  const LambdaTrack& track = *b.track;
  auto segment = std::make_shared<std::vector<std::int32_t>>(static_cast<std::size_t>(times.size()));
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    const double t = times(j);
    if (!(t >= 0.0 && t <= track.horizon()))
      throw DomainError("lambda_at: time " + std::to_string(t) + " outside [0, T]");
    (*segment)[static_cast<std::size_t>(j)] = track.segment_of(t);
  }
  return tape.piecewise_gather(b.base, net_increments(tape, b), std::move(segment));
}

ad::Var tv_penalty(ad::Tape& tape, const TrackBinding& b) {
  const LambdaTrack& track = *b.track;
  if (track.knot_count() == 0) return tape.constant(0.0);
  const ad::Var magnitude = tape.add(tape.relu(b.raw_up), tape.relu(b.raw_down));
  const ad::Var weights = tape.constant(Matrix(track.edge_weights()));
  return tape.sum(tape.mul(weights, magnitude));
}

}  // namespace cptv::cp
