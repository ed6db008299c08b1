#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "falcon/config.hpp"
#include "falcon/interpreter.hpp"
#include "falcon/ontology.hpp"

namespace falcon {

/// Checks alpha, beta ∈ [0,1] and alpha + beta < 1.
void validate_weights(double alpha, double beta);

/// Loss mixing weights after dropping absent components. With all three
/// parts present this is (alpha, beta, 1 - alpha - beta); otherwise the
/// present weights are rescaled to sum to one.
struct LossWeights {
  double tbox = 0, concept_assertions = 0, role_assertions = 0;
};
LossWeights mix_weights(double alpha, double beta, bool has_tbox, bool has_concept, bool has_role);

/// Weighted sum of the three losses; std::nullopt marks an empty component.
double combine_losses(std::optional<double> tbox, std::optional<double> concept_part,
                      std::optional<double> role, double alpha, double beta);

/// (1/|E|)(1/|T|) Σ_targets Σ_e m(e, C ⊓ ¬D). Scalar node; 0 for no targets.
template <MembershipBackend B>
NodeId tbox_loss(Evaluator<B>& ev, std::span<const UnsatTarget> targets) {
  Tape& t = ev.tape();
  if (targets.empty()) return t.scalar(0.0);
  NodeId total = t.mean(ev.on_pool(*targets[0].description));
  for (std::size_t i = 1; i < targets.size(); ++i)
    total = t.add(total, t.mean(ev.on_pool(*targets[i].description)));
  return t.scale(total, 1.0 / static_cast<double>(targets.size()));
}

/// (1/|A1|) Σ (1 - m(a, C)). Assertions sharing a concept reuse one evaluation.
template <MembershipBackend B>
NodeId abox_concept_loss(Evaluator<B>& ev, std::span<const ConceptAssertion> assertions) {
  Tape& t = ev.tape();
  if (assertions.empty()) return t.scalar(0.0);
  std::map<std::string, std::pair<ConceptPtr, std::vector<int>>> groups;
  for (const auto& a : assertions) {
    auto& g = groups[render(*a.description)];
    g.first = a.description;
    g.second.push_back(ev.backend().column_of(a.individual));
  }
  std::optional<NodeId> total;
  for (auto& [key, g] : groups) {
    NodeId miss = t.sum(t.one_minus(t.gather_cols(ev.on_pool(*g.first), g.second)));
    total = total ? t.add(*total, miss) : miss;
  }
  return t.scale(*total, 1.0 / static_cast<double>(assertions.size()));
}

/// (1/|A2|) Σ (1 - m((a,b), R)).
template <MembershipBackend B>
NodeId abox_role_loss(Evaluator<B>& ev, std::span<const RoleAssertion> assertions) {
  Tape& t = ev.tape();
  if (assertions.empty()) return t.scalar(0.0);
  std::map<std::string, std::vector<std::pair<int, int>>> groups;
  for (const auto& a : assertions)
    groups[a.relation].emplace_back(ev.backend().column_of(a.subject),
                                    ev.backend().column_of(a.object));
  std::optional<NodeId> total;
  for (auto& [rel, pairs] : groups) {
    NodeId miss = t.sum(t.one_minus(t.gather_elements(ev.relation_on_pool(rel), pairs)));
    total = total ? t.add(*total, miss) : miss;
  }
  return t.scale(*total, 1.0 / static_cast<double>(assertions.size()));
}

/// αL_T + βL_A1 + (1-α-β)L_A2 with empty components dropped and the rest
/// renormalized.
template <MembershipBackend B>
NodeId total_loss(Evaluator<B>& ev, std::span<const UnsatTarget> targets,
                  std::span<const ConceptAssertion> concepts, std::span<const RoleAssertion> roles,
                  double alpha, double beta) {
  validate_weights(alpha, beta);
  Tape& t = ev.tape();
  const auto w = mix_weights(alpha, beta, !targets.empty(), !concepts.empty(), !roles.empty());
  NodeId total = t.scalar(0.0);
  if (w.tbox > 0) total = t.add(total, t.scale(tbox_loss(ev, targets), w.tbox));
  if (w.concept_assertions > 0)
    total = t.add(total, t.scale(abox_concept_loss(ev, concepts), w.concept_assertions));
  if (w.role_assertions > 0)
    total = t.add(total, t.scale(abox_role_loss(ev, roles), w.role_assertions));
  return total;
}

/// Mean of -ln σ(score(pos) - score(neg)) over every (positive, negative)
/// pair. Negatives replace the object by a uniformly drawn named individual
/// other than the true one.
NodeId bpr_abox_loss(NeuralBackend& backend, const Signature& sig,
                     std::span<const RoleAssertion> positives, std::mt19937_64& rng,
                     int negatives_per_positive);

/// Scalar value of the weighted loss for a model on a given pool (no gradient).
double evaluate_total_loss(const ModelHandle& model, const Ontology& onto,
                           const IndividualPool& pool);
/// Same for a lookup interpretation; the whole universe is the pool.
double evaluate_total_loss(const LookupInterpretation& interp, TNorm tnorm, const Ontology& onto,
                           double alpha = 1.0 / 3.0, double beta = 1.0 / 3.0);

struct TrainResult {
  ModelHandle model;
  std::vector<double> loss_trace;  // loss before each update
  double final_loss = 0;           // loss after the last update, on a fresh pool
};

/// Resample pool -> forward -> backward -> Adam, `config.steps` times.
/// Deterministic for a given seed. Throws NumericError on a non-finite loss.
TrainResult train_model(const Ontology& onto, const TrainConfig& config, std::uint64_t seed);

struct ModelEnsemble {
  std::vector<ModelHandle> models;
  std::uint64_t base_seed = 0;
  std::vector<double> final_losses;
  std::vector<std::vector<double>> loss_traces;

  std::size_t size() const { return models.size(); }
};

/// k models with seeds base_seed .. base_seed + k - 1, trained on up to
/// `jobs` threads. Results are gathered by index, so output is independent
/// of `jobs`.
ModelEnsemble train_ensemble(const Ontology& onto, const TrainConfig& config, int k, int jobs = 1);

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& msg, int member) : std::runtime_error(msg), member_(member) {}
  int member() const { return member_; }

 private:
  int member_;
};

}  // namespace falcon
