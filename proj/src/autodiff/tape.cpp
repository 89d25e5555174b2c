#include "cptv/autodiff/tape.hpp"

#include "cptv/errors.hpp"

#include <string>

namespace cptv::ad {

const Matrix& Var::value() const {
  if (tape_ == nullptr) throw UsageError("Var: empty handle");
  return tape_->value_of(id_);
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw UsageError("Var::scalar: node is not 1x1");
  return v(0, 0);
}

Matrix GradientSet::get(SlotId slot, Eigen::Index rows, Eigen::Index cols) const {
  auto it = grads_.find(slot);
  if (it == grads_.end()) return Matrix::Zero(rows, cols);
  return it->second;
}

const Matrix& GradientSet::at(SlotId slot) const {
  auto it = grads_.find(slot);
  if (it == grads_.end()) throw UsageError("GradientSet: slot " + std::to_string(slot.value) + " absent");
  return it->second;
}

void GradientSet::accumulate(SlotId slot, const Matrix& g) {
  auto [it, inserted] = grads_.try_emplace(slot, g);
  if (!inserted) it->second += g;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  for (const auto& [slot, g] : other.grads_) accumulate(slot, g);
  return *this;
}

void GradientSet::scale(double factor) {
  for (auto& [slot, g] : grads_) g *= factor;
}

bool GradientSet::all_finite() const {
  for (const auto& [slot, g] : grads_)
    if (!g.allFinite()) return false;
  return true;
}

void Tape::check(Var v) const {
  if (!owns(v)) throw UsageError("Tape: operand is not recorded on this tape");
}

Var Tape::push(Node node) {
  compute(node);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::parameter(SlotId slot, const Matrix& value) {
  Node n;
  n.op = Op::Leaf;
  n.slot = slot;
  n.value = value;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(double value) { return constant(Matrix::Constant(1, 1, value)); }

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
}

}  // namespace

Var Tape::matmul(Var a, Var b) {
  check(a);
  check(b);
  if (a.cols() != b.rows()) throw ConfigError("matmul: inner dimensions differ");
  Node n;
  n.op = Op::MatMul;
  n.lhs = a.id_;
  n.rhs = b.id_;
  return push(std::move(n));
}

Var Tape::add_bias(Var x, Var bias) {
  check(x);
  check(bias);
  if (bias.cols() != 1 || bias.rows() != x.rows()) throw ConfigError("add_bias: bias must be a column matching rows");
  Node n;
  n.op = Op::AddBias;
  n.lhs = x.id_;
  n.rhs = bias.id_;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  check(a);
  check(b);
  require_same_shape(a.value(), b.value(), "add");
  Node n;
  n.op = Op::Add;
  n.lhs = a.id_;
  n.rhs = b.id_;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  check(a);
  check(b);
  require_same_shape(a.value(), b.value(), "sub");
  Node n;
  n.op = Op::Sub;
  n.lhs = a.id_;
  n.rhs = b.id_;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  check(a);
  check(b);
  require_same_shape(a.value(), b.value(), "mul");
  Node n;
  n.op = Op::Mul;
  n.lhs = a.id_;
  n.rhs = b.id_;
  return push(std::move(n));
}

Var Tape::affine(Var x, double scale, double shift) {
  check(x);
  Node n;
  n.op = Op::Affine;
  n.lhs = x.id_;
  n.scale = scale;
  n.shift = shift;
  return push(std::move(n));
}

Var Tape::square(Var x) {
  check(x);
  Node n;
  n.op = Op::Square;
  n.lhs = x.id_;
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  check(x);
  Node n;
  n.op = Op::Tanh;
  n.lhs = x.id_;
  return push(std::move(n));
}

Var Tape::relu(Var x) {
  check(x);
  Node n;
  n.op = Op::Relu;
  n.lhs = x.id_;
  return push(std::move(n));
}

Var Tape::sum(Var x) {
  check(x);
  Node n;
  n.op = Op::SumAll;
  n.lhs = x.id_;
  return push(std::move(n));
}

Var Tape::mean_square(Var x) {
  check(x);
  if (x.value().size() == 0) throw UsageError("mean_square: empty operand");
  Node n;
  n.op = Op::MeanSquare;
  n.lhs = x.id_;
  return push(std::move(n));
}

Var Tape::row(Var x, Eigen::Index r) {
  check(x);
  if (r < 0 || r >= x.rows()) throw ConfigError("row: index out of range");
  Node n;
  n.op = Op::Row;
  n.lhs = x.id_;
  n.row = r;
  return push(std::move(n));
}

Var Tape::cols(Var x, Eigen::Index start, Eigen::Index count) {
  check(x);
  if (start < 0 || count < 0 || start + count > x.cols()) throw ConfigError("cols: range out of bounds");
  Node n;
  n.op = Op::Cols;
  n.lhs = x.id_;
  n.row = start;
  n.count = count;
  return push(std::move(n));
}

Var Tape::piecewise_gather(Var base, Var increments, std::shared_ptr<const std::vector<std::int32_t>> segment) {
  check(base);
  check(increments);
  if (base.rows() != 1 || base.cols() != 1) throw ConfigError("piecewise_gather: base must be 1x1");
  if (increments.cols() != 1 && increments.value().size() != 0) throw ConfigError("piecewise_gather: increments must be a column");
  const auto k = static_cast<std::int32_t>(increments.value().size());
  for (std::int32_t s : *segment)
    if (s < 0 || s > k) throw ConfigError("piecewise_gather: segment index out of range");
  Node n;
  n.op = Op::PiecewiseGather;
  n.lhs = base.id_;
  n.rhs = increments.id_;
  n.segment = std::move(segment);
  return push(std::move(n));
}

void Tape::compute(Node& n) const {
  switch (n.op) {
    case Op::Leaf:
      return;
    case Op::MatMul:
      n.value.noalias() = nodes_[n.lhs].value * nodes_[n.rhs].value;
      return;
    case Op::AddBias:
      n.value = nodes_[n.lhs].value.colwise() + nodes_[n.rhs].value.col(0);
      return;
    case Op::Add:
      n.value = nodes_[n.lhs].value + nodes_[n.rhs].value;
      return;
    case Op::Sub:
      n.value = nodes_[n.lhs].value - nodes_[n.rhs].value;
      return;
    case Op::Mul:
      n.value = nodes_[n.lhs].value.cwiseProduct(nodes_[n.rhs].value);
      return;
    case Op::Affine:
      n.value = (n.scale * nodes_[n.lhs].value.array() + n.shift).matrix();
      return;
    case Op::Square:
      n.value = nodes_[n.lhs].value.array().square().matrix();
      return;
    case Op::Tanh:
      n.value = nodes_[n.lhs].value.array().tanh().matrix();
      return;
    case Op::Relu:
      n.value = nodes_[n.lhs].value.cwiseMax(0.0);
      return;
    case Op::SumAll:
      n.value = Matrix::Constant(1, 1, nodes_[n.lhs].value.sum());
      return;
    case Op::MeanSquare: {
      const Matrix& x = nodes_[n.lhs].value;
      n.value = Matrix::Constant(1, 1, x.squaredNorm() / static_cast<double>(x.size()));
      return;
    }
    case Op::Row:
      n.value = nodes_[n.lhs].value.row(n.row);
      return;
    case Op::Cols:
      n.value = nodes_[n.lhs].value.middleCols(n.row, n.count);
      return;
    case Op::PiecewiseGather: {
      const double base = nodes_[n.lhs].value(0, 0);
      const Matrix& inc = nodes_[n.rhs].value;
      const auto k = inc.size();
      std::vector<double> level(static_cast<std::size_t>(k) + 1);
      level[0] = base;
      for (Eigen::Index i = 0; i < k; ++i) level[i + 1] = level[i] + inc(i);
      const auto& seg = *n.segment;
      n.value.resize(1, static_cast<Eigen::Index>(seg.size()));
      for (std::size_t j = 0; j < seg.size(); ++j) n.value(0, static_cast<Eigen::Index>(j)) = level[seg[j]];
      return;
    }
  }
}

void Tape::replay() {
  for (Node& n : nodes_) compute(n);
}

GradientSet Tape::backward(Var root) const {
  if (!owns(root)) throw UsageError("backward: root is not on this tape");
  if (root.rows() != 1 || root.cols() != 1) throw UsageError("backward: root must be a scalar node");

  std::vector<Matrix> adj(root.id_ + 1);
  adj[root.id_] = Matrix::Ones(1, 1);

  auto acc = [&adj](std::uint32_t id, auto&& expr) {
    if (adj[id].size() == 0) {
      adj[id] = expr;
    } else {
      adj[id] += expr;
    }
  };

  GradientSet out;
  for (std::uint32_t i = 0; i <= root.id_; ++i)
    if (nodes_[i].slot) out.accumulate(*nodes_[i].slot, Matrix::Zero(nodes_[i].value.rows(), nodes_[i].value.cols()));

  for (std::int64_t ii = root.id_; ii >= 0; --ii) {
    const auto i = static_cast<std::uint32_t>(ii);
    if (adj[i].size() == 0) continue;
    const Node& n = nodes_[i];
    const Matrix& g = adj[i];
    switch (n.op) {
      case Op::Leaf:
        if (n.slot) out.accumulate(*n.slot, g);
        break;
      case Op::MatMul:
        acc(n.lhs, g * nodes_[n.rhs].value.transpose());
        acc(n.rhs, nodes_[n.lhs].value.transpose() * g);
        break;
      case Op::AddBias:
        acc(n.lhs, g);
        acc(n.rhs, g.rowwise().sum());
        break;
      case Op::Add:
        acc(n.lhs, g);
        acc(n.rhs, g);
        break;
      case Op::Sub:
        acc(n.lhs, g);
        acc(n.rhs, -g);
        break;
      case Op::Mul:
        acc(n.lhs, g.cwiseProduct(nodes_[n.rhs].value));
        acc(n.rhs, g.cwiseProduct(nodes_[n.lhs].value));
        break;
      case Op::Affine:
        acc(n.lhs, n.scale * g);
        break;
      case Op::Square:
        acc(n.lhs, (2.0 * g.array() * nodes_[n.lhs].value.array()).matrix());
        break;
      case Op::Tanh:
        acc(n.lhs, (g.array() * (1.0 - n.value.array().square())).matrix());
        break;
      case Op::Relu:
        acc(n.lhs, (g.array() * (nodes_[n.lhs].value.array() >= 0.0).cast<double>()).matrix());
        break;
      case Op::SumAll: {
        const Matrix& x = nodes_[n.lhs].value;
        acc(n.lhs, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
        break;
      }
      case Op::MeanSquare: {
        const Matrix& x = nodes_[n.lhs].value;
        acc(n.lhs, (2.0 * g(0, 0) / static_cast<double>(x.size())) * x);
        break;
      }
      case Op::Row: {
        const Matrix& x = nodes_[n.lhs].value;
        Matrix full = Matrix::Zero(x.rows(), x.cols());
        full.row(n.row) = g;
        acc(n.lhs, full);
        break;
      }
      case Op::Cols: {
        const Matrix& x = nodes_[n.lhs].value;
        Matrix full = Matrix::Zero(x.rows(), x.cols());
        full.middleCols(n.row, n.count) = g;
        acc(n.lhs, full);
        break;
      }
      case Op::PiecewiseGather: {
        const auto k = nodes_[n.rhs].value.size();
        const auto& seg = *n.segment;
        std::vector<double> hist(static_cast<std::size_t>(k) + 1, 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < seg.size(); ++j) {
          const double gj = g(0, static_cast<Eigen::Index>(j));
          hist[seg[j]] += gj;
          total += gj;
        }
        acc(n.lhs, Matrix::Constant(1, 1, total));
        // Increment i feeds every segment strictly above it.
        Matrix dinc(k, 1);
        double suffix = 0.0;
        for (Eigen::Index m = k; m >= 1; --m) {
          suffix += hist[m];
          dinc(m - 1, 0) = suffix;
        }
        acc(n.rhs, dinc);
        break;
      }
    }
  }
  return out;
}

Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
Var operator*(double s, Var x) { return x.tape()->affine(x, s, 0.0); }
Var operator+(Var x, double c) { return x.tape()->affine(x, 1.0, c); }

}  // namespace cptv::ad
