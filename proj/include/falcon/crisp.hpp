#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "falcon/interpreter.hpp"
#include "falcon/ontology.hpp"

namespace falcon {

/// Classical finite interpretation over elements 0..universe_size-1. Names
/// missing from the maps have empty extensions.
struct CrispInterpretation {
  int universe_size = 0;
  std::map<std::string, std::set<int>> concepts;
  std::map<std::string, std::set<std::pair<int, int>>> relations;
  std::map<std::string, int> individuals;

  bool operator==(const CrispInterpretation&) const = default;
};

/// Extension of `c` as a membership flag per element, by enumeration.
std::vector<bool> crisp_extension(const CrispInterpretation& interp, const Concept& c);

struct CrispReport {
  bool satisfied = true;
  std::vector<Axiom> violated;
};

/// Classical model check of every axiom. Throws SymbolError for an
/// individual without an assigned element.
CrispReport crisp_check(const CrispInterpretation& interp, const Ontology& onto);

/// x ∈ C iff m(x, C) ≥ τ for concept names, (x, y) ∈ R iff m((x,y), R) ≥ τ.
/// The universe is the pool, named individuals first.
CrispInterpretation threshold_model(const ModelHandle& model, const IndividualPool& pool,
                                    double tau = 0.5);

/// 0/1 membership tables of a crisp interpretation, over every name in `sig`.
LookupInterpretation to_lookup(const CrispInterpretation& interp, const Signature& sig);

/// The hand-built taxonomy model of the built-in Family ontology: one element
/// per named individual, each in its concept and every superclass.
CrispInterpretation family_reference_model();

}  // namespace falcon
