#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falcon/config.hpp"
#include "falcon/interpreter.hpp"
#include "falcon/ontology.hpp"
#include "falcon/training.hpp"

namespace falcon {

enum class Verdict { Entailed, Disproved, Unprovable };
std::string_view to_string(Verdict v);

struct Thresholds {
  double entail = 0.7;
  double disprove = 0.7;
};

/// How queries are evaluated against an ensemble.
struct QueryOptions {
  std::uint64_t pool_seed = 0;
  int eval_pool_size = 64;
  Thresholds thresholds;
  Aggregate aggregate = Aggregate::Min;
};
QueryOptions query_options(const TrainConfig& cfg);

double aggregate(std::span<const double> degrees, Aggregate how);

struct EntailmentVerdict {
  std::string query;
  std::vector<double> per_model;
  double aggregate = 0;
  Verdict classification = Verdict::Unprovable;
  Thresholds thresholds;
  Aggregate aggregate_kind = Aggregate::Min;
  /// Per model, the strongest counterexample degree (e.g. max_a m(a, C ⊓ ¬D)).
  std::vector<double> counterexample;
};

struct SatisfiabilityResult {
  std::vector<double> per_model;  // max_a m(a, C) in each model
  double degree = 0;              // max over models
};

SatisfiabilityResult satisfiability_degree(std::span<const ModelHandle> models, const Concept& c,
                                           const QueryOptions& opts);

/// Degree of a single model: min over the evaluation pool of m(a, ¬C ⊔ D).
double model_subsumption_degree(const ModelHandle& model, const Concept& c, const Concept& d,
                                const IndividualPool& pool);

/// Entailed if the aggregate reaches the entail threshold; Disproved if every
/// model has an element with m(a, C ⊓ ¬D) at or above the disprove threshold;
/// Unprovable otherwise.
EntailmentVerdict subsumption_degree(std::span<const ModelHandle> models, const Concept& c,
                                     const Concept& d, const QueryOptions& opts);

/// Per model m(a, C). Disproved when every model gives m(a, ¬C) at or above
/// the disprove threshold.
EntailmentVerdict instantiation_degree(std::span<const ModelHandle> models, const Concept& c,
                                       const std::string& individual, const QueryOptions& opts);

/// Per model m((a, b), R).
EntailmentVerdict role_degree(std::span<const ModelHandle> models, const std::string& relation,
                              const std::string& subject, const std::string& object,
                              const QueryOptions& opts);

/// max over models of min over every ABox assertion membership. A model only
/// counts as far as it satisfies the TBox, so each TBox axiom C ⊑ D adds
/// 1 - m(a, C ⊓ ¬D) for every individual the ABox mentions. 1 for an empty ABox.
double consistency_degree(std::span<const ModelHandle> models, const Ontology& abox,
                          const QueryOptions& opts);
/// The per-model minima behind consistency_degree.
std::vector<double> consistency_per_model(std::span<const ModelHandle> models,
                                          const Ontology& abox, const QueryOptions& opts);

/// Evaluates any axiom as a query: subsumptions, concept assertions and role
/// assertions dispatch to the functions above.
EntailmentVerdict query_axiom(std::span<const ModelHandle> models, const Axiom& axiom,
                              const QueryOptions& opts);

/// {"query", "per_model", "aggregate", "classification", ...} as one JSON line.
std::string to_json(const EntailmentVerdict& v);

}  // namespace falcon
