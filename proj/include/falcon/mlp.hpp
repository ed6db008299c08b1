#pragma once

#include <random>
#include <string>
#include <vector>

#include "falcon/params.hpp"
#include "falcon/tape.hpp"

namespace falcon {

/// Fully connected tanh network producing a raw (pre-sigmoid) score.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int output_dim = 1;
};

/// Two-argument default: concat of two n-vectors -> one hidden layer of 2n.
MlpSpec default_mlp(int dim);

void validate(const MlpSpec& spec);

/// Parameter slots of one network inside a ParamStore.
struct MlpSlots {
  std::vector<std::size_t> weights;
  std::vector<std::size_t> biases;
};

/// Registers `prefix.W{i}` / `prefix.b{i}`; weights ~ U(-bound, bound) with the
/// first layer scaled by `first_gain`, biases 0.
MlpSlots add_mlp(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                 std::mt19937_64& rng, double bound, double first_gain = 1.0);

/// Parameter leaves of one network, bound to a tape once and reused by every
/// evaluation on that tape.
struct MlpNodes {
  NodeId first_left, first_right;  // column blocks of W0 acting on each half of the input
  NodeId first_full;
  std::vector<NodeId> weights, biases;
  int half = 0;
};

MlpNodes bind_mlp(Tape& tape, const ParamStore& store, const MlpSpec& spec, const MlpSlots& slots);

/// Plain forward pass: input (input_dim × N) -> output_dim × N.
NodeId mlp_apply(Tape& tape, const MlpNodes& net, NodeId input);

enum class Pairing {
  Outer,  // every (left_i, right_j), column i + j·M
  Zip,    // (left_k, right_k)
};

/// Forward pass on concat(left, right) without materializing the concatenation.
/// left is (n × M), right is (n × K).
NodeId mlp_apply_pair(Tape& tape, const MlpNodes& net, NodeId left, NodeId right, Pairing pairing);

}  // namespace falcon
