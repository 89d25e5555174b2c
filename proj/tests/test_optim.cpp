#include "cptv/errors.hpp"
#include "cptv/optim/adam.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

using namespace cptv;
using ad::Matrix;

ad::Var squared_distance(ad::Tape& tape, Matrix& x, const Matrix& target) {
  const ad::Var p = tape.parameter({0}, x);
  return tape.mean_square(tape.sub(p, tape.constant(target)));
}

TEST(Adam, FitsAMean) {
  Matrix x = Matrix::Zero(3, 1);
  Matrix target(3, 1);
  target << 0.7, -1.2, 0.05;
  optim::AdamSettings s;
  s.step_size = 1e-2;
  s.steps = 2000;
  s.decay_every = 500;
  optim::Adam adam({{{0}, &x}}, s);
  const auto r = optim::minimize(adam, [&](ad::Tape& t) { return squared_distance(t, x, target); });
  EXPECT_EQ(r.steps, 2000);
  EXPECT_LT((x - target).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LT(r.final_loss, r.history.front());
}

TEST(Adam, ZeroStepsLeaveParametersUnchanged) {
  Matrix x = Matrix::Constant(2, 2, 0.3);
  optim::AdamSettings s;
  s.steps = 0;
  optim::Adam adam({{{0}, &x}}, s);
  const auto r = optim::minimize(adam, [&](ad::Tape& t) { return squared_distance(t, x, Matrix::Zero(2, 2)); });
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(x, Matrix::Constant(2, 2, 0.3));
}

TEST(Adam, NonFiniteLossIsNumericalError) {
  Matrix x = Matrix::Constant(1, 1, 1.0);
  optim::Adam adam(std::vector<optim::Adam::Param>{{{0}, &x}});
  EXPECT_THROW(optim::minimize(adam,
                               [&](ad::Tape& t) {
                                 const ad::Var p = t.parameter({0}, x);
                                 return t.mul(p, t.constant(std::numeric_limits<double>::quiet_NaN()));
                               }),
               NumericalError);
  EXPECT_EQ(x(0, 0), 1.0);
}

TEST(Adam, StepScaleAndLowerBound) {
  Matrix a = Matrix::Constant(1, 1, 1.0), b = Matrix::Constant(1, 1, 1.0), c = Matrix::Constant(1, 1, 0.001);
  optim::Adam adam({{{0}, &a}, {{1}, &b, 0.1}, {{2}, &c, 1.0, {}, 0.0}});
  ad::GradientSet g;
  g.accumulate(ad::SlotId{0}, Matrix::Constant(1, 1, 2.0));
  g.accumulate(ad::SlotId{1}, Matrix::Constant(1, 1, 2.0));
  g.accumulate(ad::SlotId{2}, Matrix::Constant(1, 1, 5.0));
  adam.step(g, 0.01);
  // The first bias-corrected step has magnitude lr.
  EXPECT_NEAR(a(0, 0), 0.99, 1e-9);
  EXPECT_NEAR(b(0, 0), 0.999, 1e-9);
  EXPECT_EQ(c(0, 0), 0.0);
}

TEST(Adam, LargeEpsilonShrinksSmallGradientSteps) {
  Matrix a = Matrix::Zero(1, 1), b = Matrix::Zero(1, 1);
  optim::Adam adam({{{0}, &a}, {{1}, &b, 1.0, 1e-2}});
  ad::GradientSet g;
  g.accumulate(ad::SlotId{0}, Matrix::Constant(1, 1, 1e-4));
  g.accumulate(ad::SlotId{1}, Matrix::Constant(1, 1, 1e-4));
  adam.step(g, 0.01);
  EXPECT_NEAR(a(0, 0), -0.01, 1e-5);
  EXPECT_NEAR(b(0, 0), -0.01 * 1e-4 / (1e-4 + 1e-2), 1e-12);
}

TEST(AdamSettings, DecaySchedule) {
  optim::AdamSettings s;
  s.step_size = 1e-3;
  s.decay_every = 100;
  s.decay_factor = 0.5;
  EXPECT_DOUBLE_EQ(s.step_size_at(99), 1e-3);
  EXPECT_DOUBLE_EQ(s.step_size_at(100), 5e-4);
  EXPECT_DOUBLE_EQ(s.step_size_at(250), 2.5e-4);
  s.decay_every = 0;
  EXPECT_DOUBLE_EQ(s.step_size_at(10000), 1e-3);
}

TEST(Adam, GlobalDecaySpansCalls) {
  // Constant unit gradient: each Adam step moves by the step size.
  auto travel = [](bool global) {
    Matrix x = Matrix::Zero(1, 1);
    optim::AdamSettings s;
    s.step_size = 1e-3;
    s.steps = 100;
    s.decay_every = 100;
    s.global_decay = global;
    optim::Adam adam({{{0}, &x}}, s);
    for (int call = 0; call < 2; ++call)
      (void)optim::minimize(adam, [&](ad::Tape& t) { return t.sum(t.parameter({0}, x)); });
    EXPECT_EQ(adam.steps_taken(), 200);
    return -x(0, 0);
  };
  EXPECT_NEAR(travel(false), 0.2, 1e-6);
  EXPECT_NEAR(travel(true), 0.15, 1e-6);
}

TEST(AdamSettings, Validation) {
  optim::AdamSettings s;
  s.step_size = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.beta1 = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  Matrix x(1, 1);
  EXPECT_THROW(optim::Adam(std::vector<optim::Adam::Param>{{{0}, nullptr}}), UsageError);
  EXPECT_THROW(optim::Adam(std::vector<optim::Adam::Param>{{{0}, &x, 1.0, -1.0}}), ConfigError);
}

}  // namespace
