#include "falcon/tape.hpp"

#include <cmath>
#include <string>

#include "falcon/params.hpp"

namespace falcon {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("tape: ") + what);
}

}  // namespace

NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::value(NodeId n) const { return val(n.index); }

double Tape::scalar_value(NodeId n) const {
  const Matrix& v = val(n.index);
  require(v.rows() == 1 && v.cols() == 1, "scalar_value on non-scalar node");
  return v(0, 0);
}

const Matrix& Tape::adjoint(NodeId n) const {
  static const Matrix empty;
  const Node& node = nodes_.at(n.index);
  return node.has_adjoint ? node.adjoint : empty;
}

Matrix& Tape::acc(int i) {
  Node& n = nodes_[i];
  if (!n.has_adjoint) {
    const Matrix& v = val(i);
    n.adjoint = Matrix::Zero(v.rows(), v.cols());
    n.has_adjoint = true;
  }
  return n.adjoint;
}

NodeId Tape::constant(Matrix value) {
  Node n{Op::Constant};
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Tape::scalar(double value) { return constant(Matrix::Constant(1, 1, value)); }

NodeId Tape::param(const ParamStore& store, std::size_t slot) {
  Node n{Op::Param};
  n.ref = &store[slot];
  n.i0 = static_cast<int>(slot);
  return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  require(val(a.index).cols() == val(b.index).rows(), "matmul shape mismatch");
  Node n{Op::MatMul, a.index, b.index};
  n.value.noalias() = val(a.index) * val(b.index);
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  require(val(a.index).rows() == val(b.index).rows() && val(a.index).cols() == val(b.index).cols(),
          "add shape mismatch");
  Node n{Op::Add, a.index, b.index};
  n.value = val(a.index) + val(b.index);
  return push(std::move(n));
}

NodeId Tape::add_col_broadcast(NodeId a, NodeId col) {
  const Matrix& c = val(col.index);
  require(c.cols() == 1 && c.rows() == val(a.index).rows(), "add_col_broadcast shape mismatch");
  Node n{Op::AddColBroadcast, a.index, col.index};
  n.value = val(a.index).colwise() + c.col(0);
  return push(std::move(n));
}

NodeId Tape::broadcast_rows(NodeId row, int rows) {
  require(val(row.index).rows() == 1, "broadcast_rows needs a row vector");
  Node n{Op::BroadcastRows, row.index};
  n.value = val(row.index).replicate(rows, 1);
  return push(std::move(n));
}

NodeId Tape::pairwise_col_sum(NodeId a, NodeId b) {
  const Matrix& A = val(a.index);
  const Matrix& B = val(b.index);
  require(A.rows() == B.rows(), "pairwise_col_sum row mismatch");
  const Eigen::Index m = A.cols(), k = B.cols();
  Node n{Op::PairwiseColSum, a.index, b.index};
  n.value.resize(A.rows(), m * k);
  for (Eigen::Index j = 0; j < k; ++j)
    n.value.middleCols(j * m, m) = A.colwise() + B.col(j);
  return push(std::move(n));
}

NodeId Tape::slice_cols(NodeId a, int start, int count) {
  require(start >= 0 && count >= 0 && start + count <= val(a.index).cols(), "slice_cols out of range");
  Node n{Op::SliceCols, a.index};
  n.i0 = start;
  n.i1 = count;
  n.value = val(a.index).middleCols(start, count);
  return push(std::move(n));
}

NodeId Tape::gather_cols(NodeId a, std::vector<int> cols) {
  const Matrix& A = val(a.index);
  Node n{Op::GatherCols, a.index};
  n.value.resize(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    require(cols[k] >= 0 && cols[k] < A.cols(), "gather_cols index out of range");
    n.value.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
  }
  n.index = std::move(cols);
  return push(std::move(n));
}

NodeId Tape::gather_elements(NodeId a, std::vector<std::pair<int, int>> at) {
  const Matrix& A = val(a.index);
  Node n{Op::GatherElements, a.index};
  n.value.resize(1, static_cast<Eigen::Index>(at.size()));
  for (std::size_t k = 0; k < at.size(); ++k) {
    auto [r, c] = at[k];
    require(r >= 0 && r < A.rows() && c >= 0 && c < A.cols(), "gather_elements out of range");
    n.value(0, static_cast<Eigen::Index>(k)) = A(r, c);
  }
  n.pairs = std::move(at);
  return push(std::move(n));
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
  const Matrix& A = val(a.index);
  const Matrix& B = val(b.index);
  require(A.rows() == B.rows() || A.cols() == 0 || B.cols() == 0, "concat_cols row mismatch");
  Node n{Op::ConcatCols, a.index, b.index};
  n.value.resize(A.cols() ? A.rows() : B.rows(), A.cols() + B.cols());
  n.value << A, B;
  return push(std::move(n));
}

NodeId Tape::reshape(NodeId a, int rows, int cols) {
  const Matrix& A = val(a.index);
  require(static_cast<Eigen::Index>(rows) * cols == A.size(), "reshape size mismatch");
  Node n{Op::Reshape, a.index};
  n.value = Eigen::Map<const Matrix>(A.data(), rows, cols);
  return push(std::move(n));
}

NodeId Tape::transpose(NodeId a) {
  Node n{Op::Transpose, a.index};
  n.value = val(a.index).transpose();
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId a) {
  Node n{Op::Tanh, a.index};
  n.value = val(a.index).array().tanh().matrix();
  return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId a) {
  Node n{Op::Sigmoid, a.index};
  n.value = (1.0 / (1.0 + (-val(a.index).array()).exp())).matrix();
  return push(std::move(n));
}

NodeId Tape::one_minus(NodeId a) {
  Node n{Op::OneMinus, a.index};
  n.value = (1.0 - val(a.index).array()).matrix();
  return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  require(val(a.index).rows() == val(b.index).rows() && val(a.index).cols() == val(b.index).cols(),
          "mul shape mismatch");
  Node n{Op::Mul, a.index, b.index};
  n.value = val(a.index).cwiseProduct(val(b.index));
  return push(std::move(n));
}

NodeId Tape::t_norm(TNorm family, NodeId a, NodeId b) {
  require(val(a.index).rows() == val(b.index).rows() && val(a.index).cols() == val(b.index).cols(),
          "t_norm shape mismatch");
  Node n{Op::TNormOp, a.index, b.index};
  n.family = family;
  n.value = falcon::t_norm(family, val(a.index).array(), val(b.index).array()).matrix();
  return push(std::move(n));
}

NodeId Tape::row_max(NodeId a) {
  const Matrix& A = val(a.index);
  require(A.cols() > 0, "row_max over empty rows");
  Node n{Op::RowMax, a.index};
  n.value.resize(A.rows(), 1);
  n.index.resize(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < A.cols(); ++c)
      if (A(r, c) > A(r, best)) best = c;
    n.value(r, 0) = A(r, best);
    n.index[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return push(std::move(n));
}

NodeId Tape::mean(NodeId a) {
  require(val(a.index).size() > 0, "mean of empty node");
  Node n{Op::Mean, a.index};
  n.value = Matrix::Constant(1, 1, val(a.index).mean());
  return push(std::move(n));
}

NodeId Tape::sum(NodeId a) {
  Node n{Op::Sum, a.index};
  n.value = Matrix::Constant(1, 1, val(a.index).sum());
  return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double factor) {
  Node n{Op::Scale, a.index};
  n.factor = factor;
  n.value = val(a.index) * factor;
  return push(std::move(n));
}

NodeId Tape::neg_log_sigmoid(NodeId a) {
  Node n{Op::NegLogSigmoid, a.index};
  // -log σ(x) = softplus(-x) = max(-x, 0) + log1p(exp(-|x|))
  const auto x = val(a.index).array();
  n.value = ((-x).max(0.0) + (-x.abs()).exp().log1p()).matrix();
  return push(std::move(n));
}

void Tape::backward(NodeId output) {
  const Matrix& out = val(output.index);
  if (out.rows() != 1 || out.cols() != 1)
    throw std::invalid_argument("tape: backward needs a scalar output");
  for (auto& n : nodes_) n.has_adjoint = false;
  acc(output.index)(0, 0) = 1.0;
  for (int i = output.index; i >= 0; --i)
    if (nodes_[i].has_adjoint) propagate(nodes_[i]);
}

void Tape::propagate(const Node& n) {
  const Matrix& G = n.adjoint;
  switch (n.op) {
    case Op::Constant:
    case Op::Param: break;
    case Op::MatMul:
      acc(n.a).noalias() += G * val(n.b).transpose();
      acc(n.b).noalias() += val(n.a).transpose() * G;
      break;
    case Op::Add:
      acc(n.a) += G;
      acc(n.b) += G;
      break;
    case Op::AddColBroadcast:
      acc(n.a) += G;
      acc(n.b) += G.rowwise().sum();
      break;
    case Op::BroadcastRows: acc(n.a) += G.colwise().sum(); break;
    case Op::PairwiseColSum: {
      const Eigen::Index m = val(n.a).cols(), k = val(n.b).cols();
      Matrix& dA = acc(n.a);
      Matrix& dB = acc(n.b);
      for (Eigen::Index j = 0; j < k; ++j) {
        auto block = G.middleCols(j * m, m);
        dA += block;
        dB.col(j) += block.rowwise().sum();
      }
      break;
    }
    case Op::SliceCols: acc(n.a).middleCols(n.i0, n.i1) += G; break;
    case Op::GatherCols: {
      Matrix& dA = acc(n.a);
      for (std::size_t k = 0; k < n.index.size(); ++k)
        dA.col(n.index[k]) += G.col(static_cast<Eigen::Index>(k));
      break;
    }
    case Op::GatherElements: {
      Matrix& dA = acc(n.a);
      for (std::size_t k = 0; k < n.pairs.size(); ++k)
        dA(n.pairs[k].first, n.pairs[k].second) += G(0, static_cast<Eigen::Index>(k));
      break;
    }
    case Op::ConcatCols: {
      const Eigen::Index ca = val(n.a).cols();
      if (ca > 0) acc(n.a) += G.leftCols(ca);
      if (val(n.b).cols() > 0) acc(n.b) += G.rightCols(val(n.b).cols());
      break;
    }
    case Op::Reshape: {
      Matrix& dA = acc(n.a);
      dA += Eigen::Map<const Matrix>(G.data(), dA.rows(), dA.cols());
      break;
    }
    case Op::Transpose: acc(n.a) += G.transpose(); break;
    case Op::Tanh: acc(n.a).array() += G.array() * (1.0 - n.value.array().square()); break;
    case Op::Sigmoid: {
      // σ'(x) = e^{-|x|} / (1 + e^{-|x|})², which stays nonzero where σ rounds to 1
      const auto e = (-val(n.a).array().abs()).exp();
      acc(n.a).array() += G.array() * e / (1.0 + e).square();
      break;
    }
    case Op::OneMinus: acc(n.a) -= G; break;
    case Op::Mul:
      acc(n.a).array() += G.array() * val(n.b).array();
      acc(n.b).array() += G.array() * val(n.a).array();
      break;
    case Op::TNormOp: {
      auto [dx, dy] = t_norm_partials(n.family, val(n.a).array(), val(n.b).array());
      acc(n.a).array() += G.array() * dx;
      acc(n.b).array() += G.array() * dy;
      break;
    }
    case Op::RowMax: {
      Matrix& dA = acc(n.a);
      for (std::size_t r = 0; r < n.index.size(); ++r)
        dA(static_cast<Eigen::Index>(r), n.index[r]) += G(static_cast<Eigen::Index>(r), 0);
      break;
    }
    case Op::Mean: {
      Matrix& dA = acc(n.a);
      dA.array() += G(0, 0) / static_cast<double>(dA.size());
      break;
    }
    case Op::Sum: acc(n.a).array() += G(0, 0); break;
    case Op::Scale: acc(n.a) += G * n.factor; break;
    case Op::NegLogSigmoid: {
      // d/dx softplus(-x) = σ(x) - 1 = -σ(-x)
      const auto x = val(n.a).array();
      acc(n.a).array() -= G.array() / (1.0 + x.exp());
      break;
    }
  }
}

Gradients Tape::gradients(const ParamStore& store) const {
  Gradients out = store.zeros();
  for (const auto& n : nodes_)
    if (n.op == Op::Param && n.has_adjoint) out[static_cast<std::size_t>(n.i0)] += n.adjoint;
  return out;
}

}  // namespace falcon
