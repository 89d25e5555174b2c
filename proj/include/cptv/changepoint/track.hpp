#pragma once

// Piecewise-constant coefficient track lambda(t).
//
// lambda(t) = base + sum_{i : knot_i <= t} (max(up_i, 0) - max(down_i, 0))
//
// Training keeps the raw increments up/down nonnegative by projection; the
// clamp inside the graph only matters for tracks set by hand. Its derivative
// at zero is taken as 1 so a projected increment still sees the data.
// The track is right-continuous: at a knot time the new segment's value
// applies.

#include "cptv/autodiff/tape.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace cptv::cp {

using ad::Matrix;
using ad::Vector;

enum class EdgeWeighting {
  SqrtHorizon,  // sqrt(T / (T - t))
  UShape,       // sqrt(T / (T - t)) + sqrt(T / t)
};

struct Segment {
  double start = 0.0;
  double value = 0.0;
};

class LambdaTrack {
 public:
  LambdaTrack() = default;
  // Knots strictly increasing inside (0, horizon); raw increments start at zero.
  LambdaTrack(double horizon, std::vector<double> knots, double base);

  // `count` knots at horizon * i / (count + 1), i = 1..count.
  static LambdaTrack uniform(double horizon, int count, double base);
  // Knots at each segment start after the first; increments reproduce the
  // segment values exactly. Segments must start at 0 and be increasing.
  static LambdaTrack from_segments(double horizon, const std::vector<Segment>& segments);

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] const std::vector<double>& knots() const { return knots_; }
  [[nodiscard]] std::size_t knot_count() const { return knots_.size(); }
  [[nodiscard]] double base() const { return base_(0, 0); }
  [[nodiscard]] const Matrix& base_tensor() const { return base_; }
  [[nodiscard]] const Matrix& raw_up() const { return up_; }
  [[nodiscard]] const Matrix& raw_down() const { return down_; }
  Matrix& mutable_base() { return base_; }
  Matrix& mutable_up() { return up_; }
  Matrix& mutable_down() { return down_; }

  void set_base(double value) { base_(0, 0) = value; }
  void set_raw(std::size_t knot, double up, double down);
  void set_all_raw(double up, double down);

  [[nodiscard]] EdgeWeighting weighting() const { return weighting_; }
  void set_weighting(EdgeWeighting w) { weighting_ = w; }

  // max(raw, 0) per knot.
  [[nodiscard]] Vector effective_up() const;
  [[nodiscard]] Vector effective_down() const;
  // Net jump up - down at each knot.
  [[nodiscard]] Vector jumps() const;
  // Value on each of the knot_count() + 1 segments.
  [[nodiscard]] Vector levels() const;

  // Number of knots at or before t, i.e. the index of t's segment.
  [[nodiscard]] std::int32_t segment_of(double t) const;
  // Throws DomainError outside [0, horizon].
  [[nodiscard]] double value_at(double t) const;
  [[nodiscard]] double edge_weight(double t) const;
  [[nodiscard]] Vector edge_weights() const;
  // Sum of edge_weight(knot_i) * (up_i + down_i) with effective increments.
  [[nodiscard]] double tv_value() const;

  // Slots used by bind(): base, up, down.
  static constexpr std::uint32_t kSlotCount = 3;

 private:
  void check_time(double t) const;

  double horizon_ = 1.0;
  std::vector<double> knots_;
  Matrix base_ = Matrix::Zero(1, 1);
  Matrix up_;
  Matrix down_;
  EdgeWeighting weighting_ = EdgeWeighting::SqrtHorizon;
};

struct TrackBinding {
  const LambdaTrack* track = nullptr;
  ad::Var base;
  ad::Var raw_up;
  ad::Var raw_down;
  ad::SlotId first_slot;

  [[nodiscard]] static ad::SlotId base_slot(ad::SlotId first) { return first; }
  [[nodiscard]] static ad::SlotId up_slot(ad::SlotId first) { return {first.value + 1}; }
  [[nodiscard]] static ad::SlotId down_slot(ad::SlotId first) { return {first.value + 2}; }
};

TrackBinding bind(ad::Tape& tape, const LambdaTrack& track, ad::SlotId first);
TrackBinding bind(ad::Tape& tape, LambdaTrack&& track, ad::SlotId first) = delete;

// lambda at a single time, as a 1x1 node.
ad::Var lambda_at(ad::Tape& tape, const TrackBinding& track, double t);
// lambda at each entry of `times`, as a 1xN node.
ad::Var lambda_at(ad::Tape& tape, const TrackBinding& track, const Eigen::RowVectorXd& times);
// Edge-weighted total variation of the effective increments, as a 1x1 node.
ad::Var tv_penalty(ad::Tape& tape, const TrackBinding& track);

}  // namespace cptv::cp
