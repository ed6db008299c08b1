#include "falcon/ontology.hpp"

#include <algorithm>
#include <array>

namespace falcon {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::array<std::string_view, 11> kReserved = {
    "Thing", "Nothing",   "not",     "and",      "or",        "some",
    "only",  "SubClassOf", "concept", "relation", "individual"};

ConceptPtr make(auto node) { return std::make_shared<const Concept>(Concept{std::move(node)}); }

}  // namespace

bool operator==(const Concept& a, const Concept& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const expr::Name& x) { return x.id == std::get<expr::Name>(b.node).id; },
          [](const expr::Top&) { return true; },
          [](const expr::Bottom&) { return true; },
          [&](const expr::Not& x) { return same(x.child, std::get<expr::Not>(b.node).child); },
          [&](const expr::And& x) {
            const auto& y = std::get<expr::And>(b.node);
            return same(x.left, y.left) && same(x.right, y.right);
          },
          [&](const expr::Or& x) {
            const auto& y = std::get<expr::Or>(b.node);
            return same(x.left, y.left) && same(x.right, y.right);
          },
          [&](const expr::Exists& x) {
            const auto& y = std::get<expr::Exists>(b.node);
            return x.relation == y.relation && same(x.child, y.child);
          },
          [&](const expr::Forall& x) {
            const auto& y = std::get<expr::Forall>(b.node);
            return x.relation == y.relation && same(x.child, y.child);
          }},
      a.node);
}

bool same(const ConceptPtr& a, const ConceptPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

ConceptPtr name(std::string id) { return make(expr::Name{std::move(id)}); }
ConceptPtr top() {
  static const ConceptPtr t = make(expr::Top{});
  return t;
}
ConceptPtr bottom() {
  static const ConceptPtr b = make(expr::Bottom{});
  return b;
}
ConceptPtr negate(ConceptPtr c) { return make(expr::Not{std::move(c)}); }
ConceptPtr conj(ConceptPtr l, ConceptPtr r) { return make(expr::And{std::move(l), std::move(r)}); }
ConceptPtr disj(ConceptPtr l, ConceptPtr r) { return make(expr::Or{std::move(l), std::move(r)}); }
ConceptPtr some(std::string relation, ConceptPtr c) {
  return make(expr::Exists{std::move(relation), std::move(c)});
}
ConceptPtr only(std::string relation, ConceptPtr c) {
  return make(expr::Forall{std::move(relation), std::move(c)});
}

std::string render(const Concept& c) {
  return std::visit(
      overloaded{[](const expr::Name& x) { return x.id; },
                 [](const expr::Top&) { return std::string("Thing"); },
                 [](const expr::Bottom&) { return std::string("Nothing"); },
                 [](const expr::Not& x) { return "not " + render(*x.child); },
                 [](const expr::And& x) {
                   return "(" + render(*x.left) + " and " + render(*x.right) + ")";
                 },
                 [](const expr::Or& x) {
                   return "(" + render(*x.left) + " or " + render(*x.right) + ")";
                 },
                 [](const expr::Exists& x) { return "some " + x.relation + "." + render(*x.child); },
                 [](const expr::Forall& x) { return "only " + x.relation + "." + render(*x.child); }},
      c.node);
}

namespace {
void collect(const Concept& c, FreeSymbols& out) {
  std::visit(overloaded{[&](const expr::Name& x) { out.concepts.insert(x.id); },
                        [](const expr::Top&) {}, [](const expr::Bottom&) {},
                        [&](const expr::Not& x) { collect(*x.child, out); },
                        [&](const expr::And& x) {
                          collect(*x.left, out);
                          collect(*x.right, out);
                        },
                        [&](const expr::Or& x) {
                          collect(*x.left, out);
                          collect(*x.right, out);
                        },
                        [&](const expr::Exists& x) {
                          out.relations.insert(x.relation);
                          collect(*x.child, out);
                        },
                        [&](const expr::Forall& x) {
                          out.relations.insert(x.relation);
                          collect(*x.child, out);
                        }},
             c.node);
}
}  // namespace

FreeSymbols free_symbols(const Concept& c) {
  FreeSymbols out;
  collect(c, out);
  return out;
}

int depth(const Concept& c) {
  return std::visit(
      overloaded{[](const expr::Name&) { return 0; }, [](const expr::Top&) { return 0; },
                 [](const expr::Bottom&) { return 0; },
                 [](const expr::Not& x) { return 1 + depth(*x.child); },
                 [](const expr::And& x) { return 1 + std::max(depth(*x.left), depth(*x.right)); },
                 [](const expr::Or& x) { return 1 + std::max(depth(*x.left), depth(*x.right)); },
                 [](const expr::Exists& x) { return 1 + depth(*x.child); },
                 [](const expr::Forall& x) { return 1 + depth(*x.child); }},
      c.node);
}

std::string_view to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::Concept: return "concept";
    case SymbolKind::Relation: return "relation";
    case SymbolKind::Individual: return "individual";
  }
  return "?";
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char ch) { return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || ch == '_'; };
  auto digit = [](char ch) { return ch >= '0' && ch <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char ch) { return alpha(ch) || digit(ch); });
}

bool Signature::add(SymbolKind kind, const std::string& id) {
  if (!is_identifier(id)) throw SymbolError("malformed identifier '" + id + "'");
  if (std::find(kReserved.begin(), kReserved.end(), id) != kReserved.end())
    throw SymbolError("'" + id + "' is a reserved word");
  if (auto it = index_.find(id); it != index_.end()) {
    if (it->second.first != kind)
      throw SymbolError("'" + id + "' used as " + std::string(to_string(kind)) +
                        " but declared as " + std::string(to_string(it->second.first)));
    return false;
  }
  auto& list = kind == SymbolKind::Concept    ? concepts_
               : kind == SymbolKind::Relation ? relations_
                                              : individuals_;
  index_.emplace(id, std::make_pair(kind, list.size()));
  list.push_back(id);
  return true;
}

std::optional<SymbolKind> Signature::kind_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second.first;
}

bool Signature::has(SymbolKind kind, std::string_view id) const { return kind_of(id) == kind; }

std::size_t Signature::index_of(SymbolKind kind, std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end() || it->second.first != kind)
    throw SymbolError("unknown " + std::string(to_string(kind)) + " '" + std::string(id) + "'");
  return it->second.second;
}

const std::vector<std::string>& Signature::names(SymbolKind kind) const {
  switch (kind) {
    case SymbolKind::Concept: return concepts_;
    case SymbolKind::Relation: return relations_;
    case SymbolKind::Individual: break;
  }
  return individuals_;
}

bool operator==(const Subsumption& a, const Subsumption& b) {
  return same(a.sub, b.sub) && same(a.sup, b.sup);
}
bool operator==(const ConceptAssertion& a, const ConceptAssertion& b) {
  return a.individual == b.individual && same(a.description, b.description);
}

std::string render(const Subsumption& a) { return render(*a.sub) + " SubClassOf " + render(*a.sup); }
std::string render(const ConceptAssertion& a) {
  return a.individual + " : " + render(*a.description);
}
std::string render(const RoleAssertion& a) {
  return a.relation + "(" + a.subject + ", " + a.object + ")";
}
std::string render(const Axiom& a) {
  return std::visit([](const auto& x) { return render(x); }, a);
}

namespace {
void register_concept(Signature& sig, const Concept& c) {
  auto syms = free_symbols(c);
  for (const auto& n : syms.concepts) sig.add_concept(n);
  for (const auto& r : syms.relations) sig.add_relation(r);
}
}  // namespace

void register_symbols(Signature& sig, const Axiom& axiom) {
  std::visit(overloaded{[&](const Subsumption& s) {
                          register_concept(sig, *s.sub);
                          register_concept(sig, *s.sup);
                        },
                        [&](const ConceptAssertion& s) {
                          register_concept(sig, *s.description);
                          sig.add_individual(s.individual);
                        },
                        [&](const RoleAssertion& s) {
                          sig.add_relation(s.relation);
                          sig.add_individual(s.subject);
                          sig.add_individual(s.object);
                        }},
             axiom);
}

void check_resolves(const Signature& sig, const Concept& c) {
  auto syms = free_symbols(c);
  for (const auto& n : syms.concepts) sig.index_of(SymbolKind::Concept, n);
  for (const auto& r : syms.relations) sig.index_of(SymbolKind::Relation, r);
}

bool Ontology::add(const Axiom& axiom) {
  register_symbols(signature, axiom);
  if (!seen_.insert(render(axiom)).second) {
    ++duplicates_;
    return false;
  }
  std::visit(overloaded{[&](const Subsumption& s) { tbox_.push_back(s); },
                        [&](const ConceptAssertion& s) { abox_concept_.push_back(s); },
                        [&](const RoleAssertion& s) { abox_role_.push_back(s); }},
             axiom);
  return true;
}

bool Ontology::operator==(const Ontology& o) const {
  return signature == o.signature && tbox_ == o.tbox_ && abox_concept_ == o.abox_concept_ &&
         abox_role_ == o.abox_role_;
}

std::string render(const Ontology& o) {
  std::string out;
  auto declare = [&](std::string_view keyword, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out += keyword;
    for (const auto& n : names) out += " " + n;
    out += "\n";
  };
  declare("concept", o.signature.concepts());
  declare("relation", o.signature.relations());
  declare("individual", o.signature.individuals());
  for (const auto& a : o.tbox()) out += render(a) + "\n";
  for (const auto& a : o.abox_concept()) out += render(a) + "\n";
  for (const auto& a : o.abox_role()) out += render(a) + "\n";
  return out;
}

std::uint64_t fingerprint(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t signature_hash(const Signature& sig) {
  std::string canon;
  for (auto kind : {SymbolKind::Concept, SymbolKind::Relation, SymbolKind::Individual}) {
    canon += to_string(kind);
    for (const auto& n : sig.names(kind)) canon += " " + n;
    canon += "\n";
  }
  return fingerprint(canon);
}

std::vector<UnsatTarget> normalize_tbox(const Ontology& o) {
  std::vector<UnsatTarget> out;
  out.reserve(o.tbox().size());
  for (std::size_t i = 0; i < o.tbox().size(); ++i) {
    const auto& ax = o.tbox()[i];
    out.push_back({conj(ax.sub, negate(ax.sup)), i});
  }
  return out;
}

}  // namespace falcon
