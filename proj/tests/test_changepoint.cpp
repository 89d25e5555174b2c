#include "cptv/changepoint/extraction.hpp"
#include "cptv/changepoint/refit.hpp"
#include "cptv/changepoint/track.hpp"
#include "cptv/errors.hpp"
#include "cptv/reference/sampling.hpp"
#include "cptv/reference/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace cptv;
using cp::LambdaTrack;

LambdaTrack three_segments() {
  LambdaTrack t(1.0, {1.0 / 3.0, 2.0 / 3.0}, 0.5);
  t.set_raw(0, 0.0, 0.45);
  t.set_raw(1, 0.95, 0.0);
  return t;
}

double lambda_on_tape(const LambdaTrack& track, double t) {
  ad::Tape tape;
  return cp::lambda_at(tape, cp::bind(tape, track, {0}), t).scalar();
}

TEST(Track, ZeroIncrementsAreConstant) {
  const auto t = LambdaTrack::uniform(2.0, 7, 0.3);
  for (double s : {0.0, 0.1, 0.99, 1.5, 2.0}) EXPECT_EQ(t.value_at(s), 0.3);
}

TEST(Track, ThreeSegmentValues) {
  const auto t = three_segments();
  EXPECT_NEAR(t.value_at(0.1), 0.5, 1e-15);
  EXPECT_NEAR(t.value_at(0.5), 0.05, 1e-15);
  EXPECT_NEAR(t.value_at(0.9), 1.0, 1e-15);
  EXPECT_NEAR(lambda_on_tape(t, 0.5), 0.05, 1e-15);
}

TEST(Track, RightContinuousAtKnot) {
  const auto t = three_segments();
  EXPECT_NEAR(t.value_at(1.0 / 3.0), 0.05, 1e-15);
  EXPECT_NEAR(lambda_on_tape(t, 2.0 / 3.0), 1.0, 1e-15);
}

TEST(Track, OutsideHorizonIsDomainError) {
  const auto t = three_segments();
  EXPECT_THROW((void)t.value_at(-0.01), DomainError);
  EXPECT_THROW((void)t.value_at(1.01), DomainError);
}

TEST(Track, NegativeRawIncrementIsClamped) {
  auto t = three_segments();
  t.set_raw(0, -0.3, 0.45);
  EXPECT_NEAR(t.value_at(0.5), 0.05, 1e-15);
}

TEST(Track, VectorLambdaMatchesScalar) {
  const auto t = three_segments();
  Eigen::RowVectorXd times(5);
  times << 0.0, 0.2, 1.0 / 3.0, 0.7, 1.0;
  ad::Tape tape;
  const auto v = cp::lambda_at(tape, cp::bind(tape, t, {0}), times).value();
  for (Eigen::Index i = 0; i < times.size(); ++i) EXPECT_NEAR(v(0, i), t.value_at(times(i)), 1e-15);
}

TEST(Track, SegmentRoundTrip) {
  const std::vector<cp::Segment> segs{{0.0, 0.5}, {0.25, 0.9}, {0.5, 0.1}, {0.8, 0.1 + 1e-9}};
  const auto t = LambdaTrack::from_segments(1.0, segs);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double end = i + 1 < segs.size() ? segs[i + 1].start : 1.0;
    for (double s = segs[i].start; s < end; s += 0.01) EXPECT_NEAR(t.value_at(s), segs[i].value, 1e-15);
  }
}

TEST(TotalVariation, ConstantTrackIsZero) {
  const auto t = LambdaTrack::uniform(1.0, 10, 0.4);
  EXPECT_EQ(t.tv_value(), 0.0);
  ad::Tape tape;
  EXPECT_EQ(cp::tv_penalty(tape, cp::bind(tape, t, {0})).scalar(), 0.0);
}

TEST(TotalVariation, SingleKnot) {
  LambdaTrack t(1.0, {0.5}, 0.3);
  t.set_raw(0, 0.2, 0.0);
  EXPECT_NEAR(t.edge_weight(0.5), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.tv_value(), 0.28284, 1e-5);
  ad::Tape tape;
  EXPECT_NEAR(cp::tv_penalty(tape, cp::bind(tape, t, {0})).scalar(), 0.2 * std::sqrt(2.0), 1e-15);
}

TEST(TotalVariation, CountsBothSidesOfAKnot) {
  LambdaTrack t(1.0, {0.5}, 0.3);
  t.set_raw(0, 0.2, 0.15);
  EXPECT_NEAR(t.tv_value(), 0.35 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.value_at(0.7), 0.35, 1e-15);
}

TEST(TotalVariation, LinearInPositiveIncrements) {
  auto t = LambdaTrack::uniform(1.0, 6, 0.4);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (std::size_t i = 0; i < 6; ++i) t.set_raw(i, u(rng), 0.0);
  const double v = t.tv_value();
  auto scaled = t;
  for (std::size_t i = 0; i < 6; ++i) scaled.set_raw(i, 2.5 * t.raw_up()(static_cast<Eigen::Index>(i), 0), 0.0);
  EXPECT_NEAR(scaled.tv_value(), 2.5 * v, 1e-14);
}

TEST(TotalVariation, UShapeWeighting) {
  LambdaTrack t(1.0, {0.25}, 0.3);
  t.set_weighting(cp::EdgeWeighting::UShape);
  EXPECT_NEAR(t.edge_weight(0.25), std::sqrt(1.0 / 0.75) + std::sqrt(1.0 / 0.25), 1e-15);
}

TEST(TotalVariation, GradientOnlyThroughLiveIncrements) {
  LambdaTrack t(1.0, {0.3, 0.6}, 0.3);
  t.set_raw(0, 0.2, -0.1);
  t.set_raw(1, -0.05, 0.4);
  ad::Tape tape;
  const auto b = cp::bind(tape, t, {0});
  const auto g = tape.backward(cp::tv_penalty(tape, b));
  const auto& gu = g.at(cp::TrackBinding::up_slot({0}));
  const auto& gd = g.at(cp::TrackBinding::down_slot({0}));
  EXPECT_NEAR(gu(0, 0), t.edge_weight(0.3), 1e-15);
  EXPECT_EQ(gu(1, 0), 0.0);
  EXPECT_EQ(gd(0, 0), 0.0);
  EXPECT_NEAR(gd(1, 0), t.edge_weight(0.6), 1e-15);
}

TEST(Extraction, ConstantTrackHasNone) {
  EXPECT_TRUE(cp::extract_changepoints(LambdaTrack::uniform(1.0, 20, 0.5), 0.01).empty());
}

TEST(Extraction, ThreeSegmentTrack) {
  const auto cps = cp::extract_changepoints(three_segments(), 0.01);
  ASSERT_EQ(cps.size(), 2u);
  EXPECT_NEAR(cps[0].time, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(cps[0].left, 0.5, 1e-15);
  EXPECT_NEAR(cps[0].right, 0.05, 1e-15);
  EXPECT_NEAR(cps[1].time, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(cps[1].left, 0.05, 1e-15);
  EXPECT_NEAR(cps[1].right, 1.0, 1e-15);
}

TEST(Extraction, ThresholdSemantics) {
  LambdaTrack t(1.0, {0.4, 0.6}, 0.2);
  t.set_raw(0, 0.3, 0.0);
  t.set_raw(1, 0.005, 0.0);
  const auto cps = cp::extract_changepoints(t, 0.01);
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_NEAR(cps[0].time, 0.4, 1e-15);
}

TEST(Extraction, CancellingPairIsNotAJump) {
  LambdaTrack t(1.0, {0.5}, 0.2);
  t.set_raw(0, 0.3, 0.3);
  EXPECT_TRUE(cp::extract_changepoints(t, 0.01).empty());
}

TEST(Extraction, AdjacentKnotsMerge) {
  auto t = LambdaTrack::uniform(1.0, 99, 0.5);  // knots at 0.01 spacing
  t.set_raw(32, 0.0, 0.1);
  t.set_raw(33, 0.0, 0.3);
  t.set_raw(34, 0.0, 0.05);
  t.set_raw(70, 0.5, 0.0);
  const auto cps = cp::extract_changepoints(t, {0.02, 2.0});
  ASSERT_EQ(cps.size(), 2u);
  EXPECT_NEAR(cps[0].time, 0.34, 1e-12);
  EXPECT_NEAR(cps[0].left, 0.5, 1e-12);
  EXPECT_NEAR(cps[0].right, 0.05, 1e-12);
  EXPECT_NEAR(cps[1].time, 0.71, 1e-12);
}

TEST(Extraction, DefaultThresholdScalesWithTrack) {
  EXPECT_NEAR(cp::default_threshold(three_segments()), 0.05 * 1.0, 1e-15);
  EXPECT_NEAR(cp::default_threshold(LambdaTrack::uniform(1.0, 3, 0.4)), 0.05 * 0.4, 1e-15);
}

TEST(Refit, ConstantSegmentRecoversLambda) {
  ref::GridSpec g;
  g.nx = 201;
  g.nt = 300;
  g.lambda = {{0.0, 0.5}};
  const auto sol = ref::solve_advection_diffusion(g);
  const auto batches = ref::sample_training_data(sol, {600, 100, 100}, 1, 17);

  std::mt19937_64 rng(17);
  const auto spec = pinn::PdeResidualSpec::advection_diffusion(-1.0, 1.0, 1.0);
  cp::RefitProblem p{spec, batches,
                     pinn::NetworkParams::xavier({2, 20, 20, 20, 1}, pinn::InputMap::box(spec.lo, spec.hi), rng),
                     std::nullopt, 0.2};
  p.adam.steps = 6000;
  p.adam.decay_every = 2500;
  const auto fits = cp::refit_segments(p, {});
  ASSERT_EQ(fits.size(), 1u);
  ASSERT_TRUE(fits[0].lambda.has_value());
  EXPECT_NEAR(*fits[0].lambda, 0.5, 0.02);
}

TEST(Refit, EmptyIntervalIsUnfittable) {
  const auto sol = ref::solve_advection_diffusion({.nx = 41, .nt = 60});
  auto batches = ref::sample_training_data(sol, {20, 4, 4}, 1, 1);
  // Keep only early interior points.
  batches[0].interior = batches[0].interior.select_time(0.0, 0.5, false);
  std::mt19937_64 rng(2);
  const auto spec = pinn::PdeResidualSpec::advection_diffusion(-1.0, 1.0, 1.0);
  cp::RefitProblem p{spec, batches, pinn::NetworkParams::xavier({2, 4, 1}, pinn::InputMap::box(spec.lo, spec.hi), rng),
                     std::nullopt, 0.2};
  p.adam.steps = 5;
  const auto fits = cp::refit_segments(p, {{0.6, 0.5, 0.1}});
  ASSERT_EQ(fits.size(), 2u);
  EXPECT_TRUE(fits[0].lambda.has_value());
  EXPECT_FALSE(fits[1].lambda.has_value());
}

}  // namespace
