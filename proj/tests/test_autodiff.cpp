#include "cptv/autodiff/extended.hpp"
#include "cptv/autodiff/tape.hpp"
#include "cptv/errors.hpp"
#include "cptv/pinn/network.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace cptv;
using ad::Matrix;

// u = a x + b t + c as a network without hidden layers.
pinn::NetworkParams linear_net(double a, double b, double c) {
  pinn::NetworkParams p = pinn::NetworkParams::zeros({2, 1}, pinn::InputMap::identity(2));
  p.weights[0] << a, b;
  p.biases[0](0, 0) = c;
  return p;
}

Matrix point(double x, double t) {
  Matrix m(2, 1);
  m << x, t;
  return m;
}

TEST(Tape, LinearNetworkValuesAndDerivatives) {
  ad::Tape tape;
  const auto params = linear_net(2.0, -1.0, 0.5);
  const auto net = pinn::bind(tape, params, {0});
  const auto ev = ad::forward_extended(tape, net, point(0.3, 0.7), {{2, 1}});
  EXPECT_NEAR(ev.value.scalar(), 0.4, 1e-15);
  EXPECT_NEAR(ev.first(0).scalar(), 2.0, 1e-15);
  EXPECT_NEAR(ev.first(1).scalar(), -1.0, 1e-15);
  EXPECT_EQ(ev.second(0).scalar(), 0.0);
}

TEST(Tape, LinearNetworkParameterGradient) {
  ad::Tape tape;
  const auto params = linear_net(2.0, -1.0, 0.5);
  const auto net = pinn::bind(tape, params, {0});
  const auto ev = ad::forward_extended(tape, net, point(0.3, 0.7), ad::DerivativeRequest::none(2));
  const auto g = tape.backward(ev.value);
  const Matrix gw = g.at(pinn::NetworkBinding::weight_slot({0}, 0));
  EXPECT_NEAR(gw(0, 0), 0.3, 1e-15);
  EXPECT_NEAR(gw(0, 1), 0.7, 1e-15);
  EXPECT_NEAR(g.at(pinn::NetworkBinding::bias_slot({0}, 0))(0, 0), 1.0, 1e-15);
}

TEST(Tape, SingleTanhNeuron) {
  pinn::NetworkParams p = pinn::NetworkParams::zeros({1, 1, 1}, pinn::InputMap::identity(1));
  p.weights[0](0, 0) = 1.0;
  p.weights[1](0, 0) = 1.0;
  ad::Tape tape;
  const auto net = pinn::bind(tape, p, {0});
  Matrix x(1, 1);
  x << 0.5;
  const auto ev = ad::forward_extended(tape, net, x, {{2}});
  EXPECT_NEAR(ev.value.scalar(), 0.46212, 1e-5);
  EXPECT_NEAR(ev.first(0).scalar(), 0.78645, 1e-5);
  EXPECT_NEAR(ev.second(0).scalar(), -0.72686, 1e-5);

  const double h = 1e-5;
  auto f = [&](double v) { return std::tanh(v); };
  EXPECT_NEAR(ev.first(0).scalar(), (f(0.5 + h) - f(0.5 - h)) / (2 * h), 1e-9);
  EXPECT_NEAR(ev.second(0).scalar(), (f(0.5 + h) - 2 * f(0.5) + f(0.5 - h)) / (h * h), 1e-5);
}

TEST(Tape, ConstantRootHasZeroGradients) {
  ad::Tape tape;
  Matrix w = Matrix::Constant(2, 2, 1.5);
  tape.parameter({3}, w);
  const ad::Var c = tape.constant(4.0);
  const auto g = tape.backward(c);
  ASSERT_TRUE(g.contains({3}));
  EXPECT_EQ(g.at({3}).norm(), 0.0);
}

TEST(Tape, ZeroHiddenWeightsGiveBiasOutput) {
  std::mt19937_64 rng(3);
  pinn::NetworkParams p = pinn::NetworkParams::xavier({2, 4, 4, 1}, pinn::InputMap::identity(2), rng);
  for (auto& w : p.weights) w.setZero();
  p.biases.back()(0, 0) = 0.25;
  ad::Tape tape;
  const auto net = pinn::bind(tape, p, {0});
  const auto ev = ad::forward_extended(tape, net, point(0.1, 0.2), {{2, 2}});
  EXPECT_EQ(ev.value.scalar(), 0.25);
  EXPECT_EQ(ev.first(0).scalar(), 0.0);
  EXPECT_EQ(ev.second(1).scalar(), 0.0);
}

TEST(Tape, RootFromOtherTapeIsUsageError) {
  ad::Tape a, b;
  const ad::Var v = b.constant(1.0);
  EXPECT_THROW((void)a.backward(v), UsageError);
}

TEST(Tape, NonScalarRootIsUsageError) {
  ad::Tape tape;
  const ad::Var v = tape.constant(Matrix::Ones(2, 1));
  EXPECT_THROW((void)tape.backward(v), UsageError);
}

TEST(Tape, OrderAboveTwoRejected) {
  ad::Tape tape;
  const auto params = linear_net(1, 1, 1);
  const auto net = pinn::bind(tape, params, {0});
  EXPECT_THROW(ad::forward_extended(tape, net, point(0, 0), {{3, 0}}), UnsupportedOrderError);
}

TEST(Tape, DimensionMismatchIsConfigError) {
  ad::Tape tape;
  const auto params = linear_net(1, 1, 1);
  const auto net = pinn::bind(tape, params, {0});
  EXPECT_THROW(ad::forward_extended(tape, net, Matrix::Zero(3, 1), {{0, 0, 0}}), ConfigError);
}

TEST(Tape, ReplayReproducesValues) {
  std::mt19937_64 rng(11);
  const auto p = pinn::NetworkParams::xavier({2, 5, 5, 1}, pinn::InputMap::identity(2), rng);
  ad::Tape tape;
  const auto net = pinn::bind(tape, p, {0});
  Matrix pts = Matrix::Random(2, 7);
  const auto ev = ad::forward_extended(tape, net, pts, {{2, 1}});
  const ad::Var loss = tape.mean_square(tape.add(ev.second(0), ev.first(1)));
  const double before = loss.scalar();
  tape.replay();
  EXPECT_EQ(loss.scalar(), before);
}

TEST(Tape, PiecewiseGatherGradient) {
  ad::Tape tape;
  const ad::Var base = tape.parameter({0}, Matrix::Constant(1, 1, 0.5));
  Matrix inc(3, 1);
  inc << 0.1, -0.2, 0.3;
  const ad::Var incs = tape.parameter({1}, inc);
  auto seg = std::make_shared<std::vector<std::int32_t>>(std::vector<std::int32_t>{0, 1, 3, 3, 2});
  const ad::Var out = tape.piecewise_gather(base, incs, seg);
  const Matrix& v = out.value();
  EXPECT_DOUBLE_EQ(v(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(v(0, 1), 0.6);
  EXPECT_DOUBLE_EQ(v(0, 2), 0.7);
  EXPECT_DOUBLE_EQ(v(0, 4), 0.4);
  const auto g = tape.backward(tape.sum(out));
  EXPECT_DOUBLE_EQ(g.at({0})(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(g.at({1})(0, 0), 4.0);  // segments >= 1
  EXPECT_DOUBLE_EQ(g.at({1})(1, 0), 3.0);  // segments >= 2
  EXPECT_DOUBLE_EQ(g.at({1})(2, 0), 2.0);  // segments == 3
}

TEST(Tape, ReluSubgradientAtKink) {
  ad::Tape tape;
  Matrix x(3, 1);
  x << -1.0, 0.0, 2.0;
  const ad::Var p = tape.parameter({0}, x);
  const auto g = tape.backward(tape.sum(tape.relu(p)));
  EXPECT_EQ(g.at({0})(0, 0), 0.0);
  EXPECT_EQ(g.at({0})(1, 0), 1.0);
  EXPECT_EQ(g.at({0})(2, 0), 1.0);
}

TEST(FiniteDifferenceOracle, RandomSmallNetworks) {
  const oracle::DiffReport r = oracle::differentiation_oracle(60, 2024);
  EXPECT_EQ(r.cases, 60);
  EXPECT_GT(r.ns_cases, 0);
  EXPECT_LT(r.max_param_error, 1e-5);
  EXPECT_LT(r.max_input_error, 1e-5);
}

TEST(FiniteDifferenceOracle, InputMapChainRule) {
  std::mt19937_64 rng(5);
  ad::Vector lo(2), hi(2);
  lo << -3.0, 0.0;
  hi << 1.0, 0.25;
  const auto p = pinn::NetworkParams::xavier({2, 6, 1}, pinn::InputMap::box(lo, hi), rng);
  ad::Tape tape;
  const auto net = pinn::bind(tape, p, {0});
  const Matrix x = point(-0.4, 0.1);
  const auto ev = ad::forward_extended(tape, net, x, {{2, 2}});
  for (int j = 0; j < 2; ++j) {
    const double h = 1e-5;
    Matrix a = x, b = x;
    a(j, 0) += h;
    b(j, 0) -= h;
    const double fd = (pinn::predict(p, a)(0, 0) - pinn::predict(p, b)(0, 0)) / (2 * h);
    EXPECT_LT(oracle::relative_error(ev.first(j).scalar(), fd), 1e-7);
  }
}

}  // namespace
