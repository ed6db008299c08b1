#include "falcon/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "falcon/log.hpp"

namespace falcon {

void validate_weights(double alpha, double beta) {
  if (!(alpha >= 0 && alpha <= 1 && beta >= 0 && beta <= 1))
    throw ConfigError("loss weights must lie in [0,1]");
  if (!(alpha + beta < 1)) throw ConfigError("loss weights need alpha + beta < 1");
}

LossWeights mix_weights(double alpha, double beta, bool has_tbox, bool has_concept, bool has_role) {
  validate_weights(alpha, beta);
  LossWeights w{has_tbox ? alpha : 0.0, has_concept ? beta : 0.0,
                has_role ? 1.0 - alpha - beta : 0.0};
  const double present = w.tbox + w.concept_assertions + w.role_assertions;
  const double full = 1.0;
  if (present > 0 && present != full) {
    w.tbox /= present;
    w.concept_assertions /= present;
    w.role_assertions /= present;
  }
  return w;
}

double combine_losses(std::optional<double> tbox, std::optional<double> concept_part,
                      std::optional<double> role, double alpha, double beta) {
  const auto w = mix_weights(alpha, beta, tbox.has_value(), concept_part.has_value(), role.has_value());
  return w.tbox * tbox.value_or(0.0) + w.concept_assertions * concept_part.value_or(0.0) +
         w.role_assertions * role.value_or(0.0);
}

NodeId bpr_abox_loss(NeuralBackend& backend, const Signature& sig,
                     std::span<const RoleAssertion> positives, std::mt19937_64& rng,
                     int negatives_per_positive) {
  Tape& t = backend.tape();
  const int n_ind = static_cast<int>(sig.individuals().size());
  if (positives.empty()) return t.scalar(0.0);
  if (n_ind < 2) throw std::invalid_argument("bpr: need at least two named individuals");
  std::vector<int> rel, subj, pos_obj, neg_obj;
  std::uniform_int_distribution<int> pick(0, n_ind - 2);
  for (const auto& p : positives) {
    const int r = static_cast<int>(sig.index_of(SymbolKind::Relation, p.relation));
    const int s = static_cast<int>(sig.index_of(SymbolKind::Individual, p.subject));
    const int o = static_cast<int>(sig.index_of(SymbolKind::Individual, p.object));
    for (int k = 0; k < negatives_per_positive; ++k) {
      int corrupt = pick(rng);
      if (corrupt >= o) ++corrupt;  // skip the true object
      rel.push_back(r);
      subj.push_back(s);
      pos_obj.push_back(o);
      neg_obj.push_back(corrupt);
    }
  }
  NodeId pos = backend.triple_logits(rel, subj, pos_obj);
  NodeId neg = backend.triple_logits(rel, subj, neg_obj);
  return t.mean(t.neg_log_sigmoid(t.add(pos, t.scale(neg, -1.0))));
}

namespace {

template <class T>
std::vector<T> minibatch(const std::vector<T>& all, int batch, std::mt19937_64& rng) {
  if (static_cast<int>(all.size()) <= batch) return all;
  std::vector<std::size_t> idx(all.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (int i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> d(static_cast<std::size_t>(i), idx.size() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[d(rng)]);
  }
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) out.push_back(all[idx[static_cast<std::size_t>(i)]]);
  return out;
}

struct StepData {
  std::vector<UnsatTarget> targets;
  std::vector<ConceptAssertion> concepts;
  std::vector<RoleAssertion> roles;
};

NodeId step_loss(Evaluator<NeuralBackend>& ev, const ModelHandle& model, const StepData& d,
                 std::mt19937_64& rng) {
  const auto& cfg = model.config;
  if (cfg.mode == TrainMode::Entailment)
    return total_loss(ev, std::span(d.targets), std::span(d.concepts), std::span(d.roles),
                      cfg.alpha, cfg.beta);
  Tape& t = ev.tape();
  const auto w = mix_weights(cfg.alpha, cfg.beta, !d.targets.empty(), !d.concepts.empty(),
                             !d.roles.empty());
  NodeId total = t.scalar(0.0);
  if (w.tbox > 0) total = t.add(total, t.scale(tbox_loss(ev, std::span(d.targets)), w.tbox));
  if (w.concept_assertions > 0)
    total = t.add(total, t.scale(abox_concept_loss(ev, std::span(d.concepts)), w.concept_assertions));
  if (w.role_assertions > 0)
    total = t.add(total, t.scale(bpr_abox_loss(ev.backend(), model.signature, std::span(d.roles),
                                               rng, cfg.negatives),
                                 w.role_assertions));
  return total;
}

}  // namespace

double evaluate_total_loss(const ModelHandle& model, const Ontology& onto,
                           const IndividualPool& pool) {
  const auto targets = normalize_tbox(onto);
  Tape tape;
  NeuralBackend be(tape, model);
  Evaluator ev(tape, be, model.tnorm(), be.pool_points(pool));
  return tape.scalar_value(total_loss(ev, std::span(targets), std::span(onto.abox_concept()),
                                      std::span(onto.abox_role()), model.config.alpha,
                                      model.config.beta));
}

double evaluate_total_loss(const LookupInterpretation& interp, TNorm tnorm, const Ontology& onto,
                           double alpha, double beta) {
  const auto targets = normalize_tbox(onto);
  Tape tape;
  LookupBackend be(tape, interp);
  Evaluator ev(tape, be, tnorm, be.universe());
  return tape.scalar_value(total_loss(ev, std::span(targets), std::span(onto.abox_concept()),
                                      std::span(onto.abox_role()), alpha, beta));
}

TrainResult train_model(const Ontology& onto, const TrainConfig& config, std::uint64_t seed) {
  validate(config);
  TrainResult out{init_model(onto.signature, config, seed), {}, 0.0};
  ModelHandle& model = out.model;
  const auto targets = normalize_tbox(onto);
  const std::vector<ConceptAssertion> concepts = onto.abox_concept();
  const std::vector<RoleAssertion> roles = onto.abox_role();

  std::seed_seq seq{seed, std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  Adam adam(model.params, AdamConfig{config.lr});
  out.loss_trace.reserve(static_cast<std::size_t>(config.steps));

  for (int step = 0; step < config.steps; ++step) {
    StepData d{minibatch(targets, config.batch_tbox, rng),
               minibatch(concepts, config.batch_concept, rng),
               minibatch(roles, config.batch_role, rng)};
    IndividualPool pool = sample_pool(model, rng, config.n_gauss, config.n_uniform, config.gauss_std);
    Tape tape;
    NeuralBackend be(tape, model);
    Evaluator ev(tape, be, config.tnorm, be.pool_points(pool));
    NodeId loss = step_loss(ev, model, d, rng);
    const double value = tape.scalar_value(loss);
    if (!std::isfinite(value))
      throw NumericError("non-finite loss at step " + std::to_string(step));
    out.loss_trace.push_back(value);
    tape.backward(loss);
    adam.step(model.params, tape.gradients(model.params));
  }

  IndividualPool pool = sample_pool(model, rng, config.n_gauss, config.n_uniform, config.gauss_std);
  out.final_loss = evaluate_total_loss(model, onto, pool);
  log_debug("model seed " + std::to_string(seed) + " final loss " + std::to_string(out.final_loss));
  return out;
}

ModelEnsemble train_ensemble(const Ontology& onto, const TrainConfig& config, int k, int jobs) {
  if (k < 1) throw ConfigError("ensemble size k must be >= 1");
  validate(config);
  const auto n = static_cast<std::size_t>(k);
  std::vector<std::optional<TrainResult>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = train_model(onto, config, config.seed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TrainingError("ensemble member " + std::to_string(i) + ": " + e.what(),
                          static_cast<int>(i));
    }
  }
  ModelEnsemble ens;
  ens.base_seed = config.seed;
  for (auto& r : results) {
    ens.models.push_back(std::move(r->model));
    ens.final_losses.push_back(r->final_loss);
    ens.loss_traces.push_back(std::move(r->loss_trace));
  }
  return ens;
}

}  // namespace falcon
