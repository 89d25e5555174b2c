#pragma once

// Matrix-valued reverse-mode differentiation tape.
//
// Every node holds a dense matrix. Points are laid out as columns, so a layer
// activation for N points is a (width x N) matrix and a scalar loss is 1x1.
// Nodes are appended in evaluation order, which makes the tape order a
// topological order; backward() sweeps it once in reverse.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace cptv::ad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Identifies a trainable tensor (a weight matrix, a bias, a track vector).
struct SlotId {
  std::uint32_t value = 0;
  friend auto operator<=>(const SlotId&, const SlotId&) = default;
};

class Tape;

// Handle to a node on a tape. Cheap to copy.
class Var {
 public:
  Var() = default;

  [[nodiscard]] const Matrix& value() const;
  [[nodiscard]] double scalar() const;
  [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
  [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
  [[nodiscard]] bool valid() const { return tape_ != nullptr; }
  [[nodiscard]] Tape* tape() const { return tape_; }
  [[nodiscard]] std::uint32_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// Gradients of a scalar root with respect to every parameter slot recorded
// on the tape. Slots that were recorded but not reached carry zeros.
class GradientSet {
 public:
  [[nodiscard]] bool contains(SlotId slot) const { return grads_.contains(slot); }
  // Gradient for `slot`; a zero matrix of the given shape if absent.
  [[nodiscard]] Matrix get(SlotId slot, Eigen::Index rows, Eigen::Index cols) const;
  [[nodiscard]] const Matrix& at(SlotId slot) const;
  [[nodiscard]] const std::map<SlotId, Matrix>& entries() const { return grads_; }

  void accumulate(SlotId slot, const Matrix& g);
  GradientSet& operator+=(const GradientSet& other);
  void scale(double factor);
  [[nodiscard]] bool all_finite() const;

 private:
  std::map<SlotId, Matrix> grads_;
};

enum class Op : std::uint8_t {
  Leaf,
  MatMul,
  AddBias,
  Add,
  Sub,
  Mul,
  Affine,
  Square,
  Tanh,
  Relu,
  SumAll,
  MeanSquare,
  Row,
  Cols,
  PiecewiseGather,
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = delete;
  Tape& operator=(Tape&&) = delete;

  // Trainable leaf bound to `slot`. The value is copied onto the tape.
  Var parameter(SlotId slot, const Matrix& value);
  // Non-trainable leaf.
  Var constant(Matrix value);
  Var constant(double value);

  Var matmul(Var a, Var b);
  // x + b * 1^T, with b a column vector matching x's rows.
  Var add_bias(Var x, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  // scale * x + shift, elementwise.
  Var affine(Var x, double scale, double shift);
  Var square(Var x);
  Var tanh(Var x);
  Var relu(Var x);
  Var sum(Var x);
  Var mean_square(Var x);
  Var row(Var x, Eigen::Index r);
  // Columns [start, start + count) of x.
  Var cols(Var x, Eigen::Index start, Eigen::Index count);
  // Row vector out(j) = base + sum_{i < segment[j]} increments(i).
  // `base` is 1x1, `increments` is Kx1, each segment index lies in [0, K].
  Var piecewise_gather(Var base, Var increments,
                       std::shared_ptr<const std::vector<std::int32_t>> segment);

  // Reverse sweep from a 1x1 root.
  [[nodiscard]] GradientSet backward(Var root) const;

  // Recompute every non-leaf value from the recorded leaves.
  void replay();

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const Matrix& value_of(std::uint32_t id) const { return nodes_[id].value; }
  [[nodiscard]] bool owns(Var v) const { return v.tape_ == this && v.id_ < nodes_.size(); }

 private:
  struct Node {
    Op op = Op::Leaf;
    std::uint32_t lhs = 0;
    std::uint32_t rhs = 0;
    double scale = 0.0;
    double shift = 0.0;
    Eigen::Index row = 0;  // row index, or first column for Cols
    Eigen::Index count = 0;
    std::optional<SlotId> slot;
    std::shared_ptr<const std::vector<std::int32_t>> segment;
    Matrix value;
  };

  Var push(Node node);
  void compute(Node& node) const;
  void check(Var v) const;

  std::vector<Node> nodes_;
};

// Operator sugar over the tape methods.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator*(double s, Var x);
Var operator+(Var x, double c);

}  // namespace cptv::ad
