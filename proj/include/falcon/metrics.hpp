#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "falcon/crisp.hpp"
#include "falcon/interpreter.hpp"
#include "falcon/ontology.hpp"

namespace falcon {

struct ScoredExample {
  bool positive = false;
  double score = 0;
};

/// Mean of 1 - score over entailed axioms.
double mae_entailed(std::span<const double> scores);

/// Probability that a random positive outscores a random negative, ties 0.5.
/// All three throw std::invalid_argument unless both classes are present.
double auc(std::span<const ScoredExample> examples);
/// Area under the step-wise precision/recall curve, one step per distinct score.
double aupr(std::span<const ScoredExample> examples);
/// Best F1 over thresholds 0.00, 0.01, ..., 1.00 (predict positive iff score >= τ).
double fmax(std::span<const ScoredExample> examples, int grid = 100);

struct RankingQuery {
  std::string relation;
  int subject = 0;
  int object = 0;
  std::vector<int> candidates;  // candidate objects, including `object`
  std::set<int> known_true;     // every true object for (relation, subject)
};

enum class RankMode { Raw, Filtered };

struct RankMetrics {
  double mrr = 0, hits3 = 0, hits10 = 0, hits100 = 0;
};

/// Score of every candidate of a query, in candidate order.
using CandidateScorer = std::function<std::vector<double>(const RankingQuery&)>;

/// 1-based rank of the true object. Equal scores rank ahead of it; in
/// filtered mode other known-true candidates are skipped.
int rank_of(const RankingQuery& q, std::span<const double> scores, RankMode mode);

RankMetrics rank_metrics(std::span<const RankingQuery> queries, const CandidateScorer& scorer,
                         RankMode mode);

/// Ranks candidates by the relation network's pre-sigmoid score.
CandidateScorer model_scorer(const ModelHandle& model);

/// Expected MRR of a uniformly random ranking of n candidates: H_n / n.
double random_mrr(int n);
/// Mean random MRR over queries, each with the candidate count left after
/// filtering in `mode`.
double random_mrr(std::span<const RankingQuery> queries, RankMode mode);

/// One query per role assertion; every named individual is a candidate.
std::vector<RankingQuery> ranking_queries(const Ontology& onto, std::span<const RoleAssertion> test);

/// Chains of individuals with parentOf between neighbours and ancestorOf
/// between every ordered pair along a chain. A seeded share of the ancestorOf
/// facts is held out as the test split; the rest plus every parentOf fact is
/// the training ABox.
struct SyntheticKg {
  Ontology train;
  std::vector<RoleAssertion> test;
};
SyntheticKg synthetic_transitive_kg(std::uint64_t seed, int chains = 4, int chain_length = 5,
                                    double test_share = 0.3);

struct Injection {
  Ontology ontology;
  std::vector<ConceptAssertion> manifest;
};

/// Disjoint name pairs, read from TBox axioms of the form (A and B) SubClassOf Nothing.
std::vector<std::pair<std::string, std::string>> disjoint_pairs(const Ontology& onto);

/// Adds n fresh individuals inc_0 .. inc_{n-1}, each asserted into both sides
/// of a randomly drawn disjoint pair. Throws std::invalid_argument when the
/// ontology has no disjointness axiom.
Injection inject_inconsistency(const Ontology& onto, int n, std::mt19937_64& rng);

/// Name-level subsumptions A ⊑ B entailed by following atomic TBox edges,
/// excluding A ⊑ A and those stated in the TBox.
std::vector<Subsumption> derived_name_subsumptions(const Ontology& onto);

/// Name-level A ⊑ B that fail in `reference`, a model of `onto`, and so are
/// neither stated nor entailed.
std::vector<Subsumption> unprovable_name_subsumptions(const Ontology& onto,
                                                      const CrispInterpretation& reference);

struct LabeledAxioms {
  std::vector<Subsumption> entailed;
  std::vector<Subsumption> unprovable;
};

/// Family evaluation set: the derived name subsumptions plus
/// (Female and Child) ⊑ Girl and (some hasChild.Person and Female) ⊑ Mother as
/// entailed; the unprovable set from the reference taxonomy model.
LabeledAxioms family_labeled_axioms();

}  // namespace falcon
