#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "falcon/fuzzy.hpp"

namespace falcon {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrainMode { Entailment, Ranking };
enum class Aggregate { Min, Mean };

std::string_view to_string(TrainMode m);
std::string_view to_string(Aggregate a);
TrainMode parse_mode(std::string_view s);
Aggregate parse_aggregate(std::string_view s);

/// Everything that determines a training run and how its models are queried.
/// Defaults follow the tuned Family settings (dim 50, lr 1e-2, Product
/// t-norm, 2 Gaussian + 2 uniform anonymous individuals per step).
struct TrainConfig {
  int dim = 50;
  double lr = 1e-2;
  int steps = 2000;
  TNorm tnorm = TNorm::Product;
  double alpha = 1.0 / 3.0;  // TBox weight
  double beta = 1.0 / 3.0;   // concept-assertion weight; roles get 1 - alpha - beta
  int n_gauss = 2;
  int n_uniform = 2;
  double gauss_std = 0.1;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::Entailment;
  int negatives = 8;
  int batch_tbox = 256;
  int batch_concept = 64;
  int batch_role = 64;
  std::vector<int> hidden;  // empty means one layer of width 2·dim
  double emb_init = 0;         // embeddings ~ U(-emb_init, emb_init); 0 means 1/sqrt(dim)
  double mlp_input_gain = 1;   // first-layer weight bound is mlp_input_gain/sqrt(dim)
  int eval_pool_size = 64;
  double entail_threshold = 0.7;
  double disprove_threshold = 0.7;
  Aggregate aggregate = Aggregate::Min;

  bool operator==(const TrainConfig&) const = default;
};

/// Settings for the built-in Family ontology: embeddings drawn from the same
/// box as uniform anonymous samples, a steep first layer, and a TBox-heavy
/// loss mix. With the plain defaults the networks saturate into models where
/// every concept holds everywhere.
TrainConfig family_config();

/// Throws ConfigError on any violated constraint (alpha + beta < 1, dim >= 2, ...).
void validate(const TrainConfig& cfg);

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(TrainConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});

std::string render(const TrainConfig& cfg);

}  // namespace falcon
