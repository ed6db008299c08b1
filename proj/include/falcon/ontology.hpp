#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace falcon {

struct Concept;
using ConceptPtr = std::shared_ptr<const Concept>;

namespace expr {
struct Name {
  std::string id;
};
struct Top {};
struct Bottom {};
struct Not {
  ConceptPtr child;
};
struct And {
  ConceptPtr left, right;
};
struct Or {
  ConceptPtr left, right;
};
struct Exists {
  std::string relation;
  ConceptPtr child;
};
struct Forall {
  std::string relation;
  ConceptPtr child;
};
}  // namespace expr

/// Immutable ALC concept description. Children are shared, so subtrees can be
/// reused across axioms without copying.
struct Concept {
  std::variant<expr::Name, expr::Top, expr::Bottom, expr::Not, expr::And,
               expr::Or, expr::Exists, expr::Forall>
      node;
};

bool operator==(const Concept& a, const Concept& b);
bool same(const ConceptPtr& a, const ConceptPtr& b);

ConceptPtr name(std::string id);
ConceptPtr top();
ConceptPtr bottom();
ConceptPtr negate(ConceptPtr c);
ConceptPtr conj(ConceptPtr l, ConceptPtr r);
ConceptPtr disj(ConceptPtr l, ConceptPtr r);
ConceptPtr some(std::string relation, ConceptPtr c);
ConceptPtr only(std::string relation, ConceptPtr c);

/// Native surface syntax, fully parenthesized for binary operators.
std::string render(const Concept& c);
inline std::string render(const ConceptPtr& c) { return render(*c); }

struct FreeSymbols {
  std::set<std::string> concepts;
  std::set<std::string> relations;
  bool operator==(const FreeSymbols&) const = default;
};

FreeSymbols free_symbols(const Concept& c);

/// Nesting depth; names and constants have depth 0.
int depth(const Concept& c);

enum class SymbolKind { Concept, Relation, Individual };

std::string_view to_string(SymbolKind k);

class SymbolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_identifier(std::string_view s);

/// Concept, relation and individual names. The three sets are disjoint and
/// keep insertion order, which fixes parameter layout downstream.
class Signature {
 public:
  /// Returns false if already present with the same kind; throws SymbolError on
  /// a kind clash or a malformed identifier.
  bool add(SymbolKind kind, const std::string& id);
  bool add_concept(const std::string& id) { return add(SymbolKind::Concept, id); }
  bool add_relation(const std::string& id) { return add(SymbolKind::Relation, id); }
  bool add_individual(const std::string& id) {
    return add(SymbolKind::Individual, id);
  }

  std::optional<SymbolKind> kind_of(std::string_view id) const;
  bool has(SymbolKind kind, std::string_view id) const;

  /// Index within the kind's list. Throws SymbolError when absent.
  std::size_t index_of(SymbolKind kind, std::string_view id) const;

  const std::vector<std::string>& concepts() const { return concepts_; }
  const std::vector<std::string>& relations() const { return relations_; }
  const std::vector<std::string>& individuals() const { return individuals_; }
  const std::vector<std::string>& names(SymbolKind kind) const;

  bool operator==(const Signature& o) const {
    return concepts_ == o.concepts_ && relations_ == o.relations_ &&
           individuals_ == o.individuals_;
  }

 private:
  std::vector<std::string> concepts_, relations_, individuals_;
  std::unordered_map<std::string, std::pair<SymbolKind, std::size_t>> index_;
};

struct Subsumption {
  ConceptPtr sub, sup;
};
struct ConceptAssertion {
  ConceptPtr description;
  std::string individual;
};
struct RoleAssertion {
  std::string relation, subject, object;
  bool operator==(const RoleAssertion&) const = default;
};

using Axiom = std::variant<Subsumption, ConceptAssertion, RoleAssertion>;

bool operator==(const Subsumption& a, const Subsumption& b);
bool operator==(const ConceptAssertion& a, const ConceptAssertion& b);

std::string render(const Subsumption& a);
std::string render(const ConceptAssertion& a);
std::string render(const RoleAssertion& a);
std::string render(const Axiom& a);

/// Signature plus TBox and the two ABox parts. Axioms are kept in insertion
/// order with set semantics: a repeated axiom is dropped and counted.
class Ontology {
 public:
  Signature signature;

  /// Adds the axiom after registering every symbol it mentions. Returns false
  /// for a duplicate.
  bool add(const Axiom& axiom);

  const std::vector<Subsumption>& tbox() const { return tbox_; }
  const std::vector<ConceptAssertion>& abox_concept() const { return abox_concept_; }
  const std::vector<RoleAssertion>& abox_role() const { return abox_role_; }
  std::size_t duplicates_dropped() const { return duplicates_; }

  bool operator==(const Ontology& o) const;

 private:
  std::vector<Subsumption> tbox_;
  std::vector<ConceptAssertion> abox_concept_;
  std::vector<RoleAssertion> abox_role_;
  std::unordered_set<std::string> seen_;
  std::size_t duplicates_ = 0;
};

/// Registers every name mentioned by the axiom, inferring kinds from position.
void register_symbols(Signature& sig, const Axiom& axiom);

/// Throws SymbolError if any name in `c` is missing from `sig` or has the
/// wrong kind.
void check_resolves(const Signature& sig, const Concept& c);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

struct ParseOptions {
  /// Reject names that were not declared with a `concept`/`relation`/
  /// `individual` line before use.
  bool strict = false;
};

Ontology parse_ontology(std::string_view text, const ParseOptions& opts = {});
ConceptPtr parse_concept(std::string_view text);
Axiom parse_axiom(std::string_view text);

/// Declarations followed by axioms; parse_ontology(render(o)) == o.
std::string render(const Ontology& o);

/// 64-bit FNV-1a of the rendered text.
std::uint64_t fingerprint(std::string_view text);
std::uint64_t signature_hash(const Signature& sig);

/// C ⊑ D rewritten as the concept C ⊓ ¬D whose extension must be empty.
struct UnsatTarget {
  ConceptPtr description;
  std::size_t origin;
};

std::vector<UnsatTarget> normalize_tbox(const Ontology& o);

/// The Family ontology: 25 subsumptions over 10 concept names and 2 relations,
/// plus one asserted individual per concept name (a_child : Child, ...).
Ontology builtin_family();

}  // namespace falcon
