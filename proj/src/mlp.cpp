#include "falcon/mlp.hpp"

#include <stdexcept>

namespace falcon {

MlpSpec default_mlp(int dim) { return MlpSpec{2 * dim, {2 * dim}, 1}; }

void validate(const MlpSpec& spec) {
  if (spec.input_dim <= 0 || spec.output_dim <= 0)
    throw std::invalid_argument("mlp: dimensions must be positive");
  for (int h : spec.hidden_dims)
    if (h <= 0) throw std::invalid_argument("mlp: hidden widths must be positive");
}

MlpSlots add_mlp(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                 std::mt19937_64& rng, double bound, double first_gain) {
  validate(spec);
  std::uniform_real_distribution<double> u(-bound, bound);
  MlpSlots slots;
  int in = spec.input_dim;
  std::vector<int> outs = spec.hidden_dims;
  outs.push_back(spec.output_dim);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    Matrix w(outs[i], in);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = u(rng);
    if (i == 0) w *= first_gain;
    slots.weights.push_back(store.add(prefix + ".W" + std::to_string(i), std::move(w)));
    slots.biases.push_back(store.add(prefix + ".b" + std::to_string(i), Matrix::Zero(outs[i], 1)));
    in = outs[i];
  }
  return slots;
}

MlpNodes bind_mlp(Tape& tape, const ParamStore& store, const MlpSpec& spec, const MlpSlots& slots) {
  MlpNodes net;
  for (auto s : slots.weights) net.weights.push_back(tape.param(store, s));
  for (auto s : slots.biases) net.biases.push_back(tape.param(store, s));
  net.first_full = net.weights.front();
  if (spec.input_dim % 2 == 0) {
    net.half = spec.input_dim / 2;
    net.first_left = tape.slice_cols(net.first_full, 0, net.half);
    net.first_right = tape.slice_cols(net.first_full, net.half, net.half);
  }
  return net;
}

namespace {

NodeId finish(Tape& tape, const MlpNodes& net, NodeId first_pre) {
  NodeId h = tape.add_col_broadcast(first_pre, net.biases[0]);
  for (std::size_t i = 1; i < net.weights.size(); ++i) {
    h = tape.tanh(h);
    h = tape.add_col_broadcast(tape.matmul(net.weights[i], h), net.biases[i]);
  }
  return h;
}

}  // namespace

NodeId mlp_apply(Tape& tape, const MlpNodes& net, NodeId input) {
  if (tape.value(input).rows() != tape.value(net.first_full).cols())
    throw std::invalid_argument("mlp: input has " + std::to_string(tape.value(input).rows()) +
                                " rows, expected " +
                                std::to_string(tape.value(net.first_full).cols()));
  return finish(tape, net, tape.matmul(net.first_full, input));
}

NodeId mlp_apply_pair(Tape& tape, const MlpNodes& net, NodeId left, NodeId right, Pairing pairing) {
  if (net.half == 0 || tape.value(left).rows() != net.half || tape.value(right).rows() != net.half)
    throw std::invalid_argument("mlp: paired inputs must each have half the input width");
  NodeId a = tape.matmul(net.first_left, left);
  NodeId b = tape.matmul(net.first_right, right);
  NodeId pre;
  if (pairing == Pairing::Outer) {
    pre = tape.pairwise_col_sum(a, b);
  } else {
    if (tape.value(a).cols() != tape.value(b).cols())
      throw std::invalid_argument("mlp: zipped inputs need equal column counts");
    pre = tape.add(a, b);
  }
  return finish(tape, net, pre);
}

}  // namespace falcon
