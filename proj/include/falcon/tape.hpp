#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "falcon/fuzzy.hpp"

namespace falcon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

class ParamStore;
using Gradients = std::vector<Matrix>;

struct NodeId {
  int index = -1;
  bool valid() const { return index >= 0; }
  bool operator==(const NodeId&) const = default;
};

enum class Op : std::uint8_t {
  Constant,
  Param,
  MatMul,
  Add,
  AddColBroadcast,  // A (m×n) + b (m×1) per column
  BroadcastRows,    // v (1×n) repeated to m×n
  PairwiseColSum,   // A (h×m), B (h×n) -> h×(m·n), column i + j·m = A_i + B_j
  SliceCols,
  GatherCols,
  GatherElements,
  ConcatCols,
  Reshape,
  Transpose,
  Tanh,
  Sigmoid,
  OneMinus,
  Mul,
  TNormOp,
  RowMax,
  Mean,
  Sum,
  Scale,
  NegLogSigmoid,
};

/// Append-only reverse-mode tape over dense matrices. Parents always precede
/// children, so a single reverse sweep computes every adjoint.
///
/// Parameter leaves reference the ParamStore's matrices without copying; the
/// store must outlive the tape and stay unmodified until backward() returns.
class Tape {
 public:
  Tape() { nodes_.reserve(256); }

  NodeId constant(Matrix value);
  NodeId scalar(double value);
  NodeId param(const ParamStore& store, std::size_t slot);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId add_col_broadcast(NodeId a, NodeId col);
  NodeId broadcast_rows(NodeId row, int rows);
  NodeId pairwise_col_sum(NodeId a, NodeId b);
  NodeId slice_cols(NodeId a, int start, int count);
  NodeId gather_cols(NodeId a, std::vector<int> cols);
  /// 1×k row of a(rows[i], cols[i]).
  NodeId gather_elements(NodeId a, std::vector<std::pair<int, int>> at);
  NodeId concat_cols(NodeId a, NodeId b);
  /// Column-major reinterpretation.
  NodeId reshape(NodeId a, int rows, int cols);
  NodeId transpose(NodeId a);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId one_minus(NodeId a);
  NodeId mul(NodeId a, NodeId b);
  NodeId t_norm(TNorm family, NodeId a, NodeId b);
  /// m×1 of row maxima; the first maximal entry receives the gradient.
  NodeId row_max(NodeId a);
  NodeId mean(NodeId a);
  NodeId sum(NodeId a);
  NodeId scale(NodeId a, double factor);
  /// -log σ(x) elementwise, evaluated stably.
  NodeId neg_log_sigmoid(NodeId a);

  const Matrix& value(NodeId n) const;
  double scalar_value(NodeId n) const;
  const Matrix& adjoint(NodeId n) const;
  Op op(NodeId n) const { return nodes_.at(n.index).op; }
  /// First (which = 0) or second operand of a node; invalid for leaves.
  NodeId input(NodeId n, int which = 0) const {
    const auto& node = nodes_.at(n.index);
    return NodeId{which == 0 ? node.a : node.b};
  }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a 1×1 output. Throws std::invalid_argument otherwise.
  void backward(NodeId output);

  /// Adjoints of every parameter leaf, summed per slot and laid out like the
  /// store. Slots never touched by the forward pass get zeros.
  Gradients gradients(const ParamStore& store) const;

 private:
  struct Node {
    Op op;
    int a = -1, b = -1;
    Matrix value{};
    const Matrix* ref = nullptr;
    Matrix adjoint{};
    bool has_adjoint = false;
    TNorm family = TNorm::Product;
    double factor = 0;
    int i0 = 0, i1 = 0;
    std::vector<int> index{};
    std::vector<std::pair<int, int>> pairs{};
  };

  NodeId push(Node n);
  const Matrix& val(int i) const { return nodes_[i].ref ? *nodes_[i].ref : nodes_[i].value; }
  Matrix& acc(int i);
  void propagate(const Node& n);

  std::vector<Node> nodes_;
};

}  // namespace falcon
