#include "falcon/entailment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace falcon {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Entailed: return "entailed";
    case Verdict::Disproved: return "disproved";
    case Verdict::Unprovable: return "unprovable";
  }
  return "?";
}

QueryOptions query_options(const TrainConfig& cfg) {
  QueryOptions o;
  o.pool_seed = cfg.seed;
  o.eval_pool_size = cfg.eval_pool_size;
  o.thresholds = {cfg.entail_threshold, cfg.disprove_threshold};
  o.aggregate = cfg.aggregate;
  return o;
}

double aggregate(std::span<const double> degrees, Aggregate how) {
  if (degrees.empty()) throw std::invalid_argument("aggregate over no models");
  if (how == Aggregate::Min) return *std::min_element(degrees.begin(), degrees.end());
  return std::accumulate(degrees.begin(), degrees.end(), 0.0) / static_cast<double>(degrees.size());
}

namespace {

void require_models(std::span<const ModelHandle> models) {
  if (models.empty()) throw std::invalid_argument("query needs at least one model");
}

EntailmentVerdict start(std::string query, const QueryOptions& opts) {
  EntailmentVerdict v;
  v.query = std::move(query);
  v.thresholds = opts.thresholds;
  v.aggregate_kind = opts.aggregate;
  return v;
}

/// Entailed / Disproved / Unprovable from the aggregate and per-model counterexamples.
void classify(EntailmentVerdict& v) {
  v.aggregate = aggregate(v.per_model, v.aggregate_kind);
  const bool refuted_everywhere =
      !v.counterexample.empty() &&
      std::all_of(v.counterexample.begin(), v.counterexample.end(),
                  [&](double x) { return x >= v.thresholds.disprove; });
  if (v.aggregate >= v.thresholds.entail)
    v.classification = Verdict::Entailed;
  else if (refuted_everywhere)
    v.classification = Verdict::Disproved;
  else
    v.classification = Verdict::Unprovable;
}

IndividualPool pool_for(const ModelHandle& m, const QueryOptions& opts) {
  return eval_pool(m, opts.pool_seed, opts.eval_pool_size);
}

int named_column(const ModelHandle& m, const std::string& individual) {
  return static_cast<int>(m.signature.index_of(SymbolKind::Individual, individual));
}

}  // namespace

SatisfiabilityResult satisfiability_degree(std::span<const ModelHandle> models, const Concept& c,
                                           const QueryOptions& opts) {
  require_models(models);
  SatisfiabilityResult r;
  for (const auto& m : models) r.per_model.push_back(pool_membership(m, pool_for(m, opts), c).maxCoeff());
  r.degree = *std::max_element(r.per_model.begin(), r.per_model.end());
  return r;
}

double model_subsumption_degree(const ModelHandle& model, const Concept& c, const Concept& d,
                                const IndividualPool& pool) {
  const auto query = disj(negate(std::make_shared<Concept>(c)), std::make_shared<Concept>(d));
  return pool_membership(model, pool, *query).minCoeff();
}

EntailmentVerdict subsumption_degree(std::span<const ModelHandle> models, const Concept& c,
                                     const Concept& d, const QueryOptions& opts) {
  require_models(models);
  auto v = start(render(c) + " SubClassOf " + render(d), opts);
  const auto cp = std::make_shared<Concept>(c);
  const auto dp = std::make_shared<Concept>(d);
  const auto holds = disj(negate(cp), dp);
  const auto refutes = conj(cp, negate(dp));
  for (const auto& m : models) {
    const auto pool = pool_for(m, opts);
    v.per_model.push_back(pool_membership(m, pool, *holds).minCoeff());
    v.counterexample.push_back(pool_membership(m, pool, *refutes).maxCoeff());
  }
  classify(v);
  return v;
}

EntailmentVerdict instantiation_degree(std::span<const ModelHandle> models, const Concept& c,
                                       const std::string& individual, const QueryOptions& opts) {
  require_models(models);
  auto v = start(individual + " : " + render(c), opts);
  const auto cp = std::make_shared<Concept>(c);
  const auto negated = negate(cp);
  for (const auto& m : models) {
    const int col = named_column(m, individual);
    const auto pool = pool_for(m, opts);
    v.per_model.push_back(pool_membership(m, pool, *cp)(col));
    v.counterexample.push_back(pool_membership(m, pool, *negated)(col));
  }
  classify(v);
  return v;
}

EntailmentVerdict role_degree(std::span<const ModelHandle> models, const std::string& relation,
                              const std::string& subject, const std::string& object,
                              const QueryOptions& opts) {
  require_models(models);
  auto v = start(relation + "(" + subject + ", " + object + ")", opts);
  for (const auto& m : models) {
    const double deg = relation_membership(m, m.individual_embedding(subject),
                                           m.individual_embedding(object), relation);
    v.per_model.push_back(deg);
    v.counterexample.push_back(1.0 - deg);
  }
  classify(v);
  return v;
}

std::vector<double> consistency_per_model(std::span<const ModelHandle> models,
                                          const Ontology& abox, const QueryOptions& opts) {
  require_models(models);
  std::vector<double> out;
  for (const auto& m : models) {
    double worst = 1.0;
    const auto pool = pool_for(m, opts);
    for (const auto& a : abox.abox_concept())
      worst = std::min(worst, pool_membership(m, pool, *a.description)(named_column(m, a.individual)));
    std::set<int> mentioned;
    for (const auto& a : abox.abox_concept()) mentioned.insert(named_column(m, a.individual));
    for (const auto& r : abox.abox_role()) {
      worst = std::min(worst, relation_membership(m, m.individual_embedding(r.subject),
                                                  m.individual_embedding(r.object), r.relation));
      mentioned.insert(named_column(m, r.subject));
      mentioned.insert(named_column(m, r.object));
    }
    if (!mentioned.empty())
      for (const auto& t : normalize_tbox(abox)) {
        const RowVector v = pool_membership(m, pool, *t.description);
        for (int e : mentioned) worst = std::min(worst, 1.0 - v(e));
      }
    out.push_back(worst);
  }
  return out;
}

double consistency_degree(std::span<const ModelHandle> models, const Ontology& abox,
                          const QueryOptions& opts) {
  const auto per = consistency_per_model(models, abox, opts);
  return *std::max_element(per.begin(), per.end());
}

EntailmentVerdict query_axiom(std::span<const ModelHandle> models, const Axiom& axiom,
                              const QueryOptions& opts) {
  if (auto* s = std::get_if<Subsumption>(&axiom)) return subsumption_degree(models, *s->sub, *s->sup, opts);
  if (auto* a = std::get_if<ConceptAssertion>(&axiom))
    return instantiation_degree(models, *a->description, a->individual, opts);
  const auto& r = std::get<RoleAssertion>(axiom);
  return role_degree(models, r.relation, r.subject, r.object, opts);
}

std::string to_json(const EntailmentVerdict& v) {
  nlohmann::ordered_json j;
  j["query"] = v.query;
  j["per_model"] = v.per_model;
  j["aggregate"] = v.aggregate;
  j["aggregate_kind"] = std::string(to_string(v.aggregate_kind));
  j["classification"] = std::string(to_string(v.classification));
  j["counterexample"] = v.counterexample;
  j["thresholds"] = {{"entail", v.thresholds.entail}, {"disprove", v.thresholds.disprove}};
  return j.dump();
}

}  // namespace falcon
