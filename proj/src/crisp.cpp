#include "falcon/crisp.hpp"

#include <algorithm>

namespace falcon {

namespace {

bool related(const CrispInterpretation& interp, const std::string& r, int x, int y) {
  auto it = interp.relations.find(r);
  return it != interp.relations.end() && it->second.contains({x, y});
}

}  // namespace

std::vector<bool> crisp_extension(const CrispInterpretation& interp, const Concept& c) {
  const auto n = static_cast<std::size_t>(interp.universe_size);
  if (auto* x = std::get_if<expr::Name>(&c.node)) {
    std::vector<bool> out(n, false);
    if (auto it = interp.concepts.find(x->id); it != interp.concepts.end())
      for (int e : it->second)
        if (e >= 0 && static_cast<std::size_t>(e) < n) out[static_cast<std::size_t>(e)] = true;
    return out;
  }
  if (std::holds_alternative<expr::Top>(c.node)) return std::vector<bool>(n, true);
  if (std::holds_alternative<expr::Bottom>(c.node)) return std::vector<bool>(n, false);
  if (auto* x = std::get_if<expr::Not>(&c.node)) {
    auto out = crisp_extension(interp, *x->child);
    out.flip();
    return out;
  }
  if (auto* x = std::get_if<expr::And>(&c.node)) {
    auto l = crisp_extension(interp, *x->left);
    const auto r = crisp_extension(interp, *x->right);
    for (std::size_t i = 0; i < n; ++i) l[i] = l[i] && r[i];
    return l;
  }
  if (auto* x = std::get_if<expr::Or>(&c.node)) {
    auto l = crisp_extension(interp, *x->left);
    const auto r = crisp_extension(interp, *x->right);
    for (std::size_t i = 0; i < n; ++i) l[i] = l[i] || r[i];
    return l;
  }
  std::vector<bool> out(n, false);
  if (auto* x = std::get_if<expr::Exists>(&c.node)) {
    const auto body = crisp_extension(interp, *x->child);
    for (int a = 0; a < interp.universe_size; ++a)
      for (int b = 0; b < interp.universe_size && !out[static_cast<std::size_t>(a)]; ++b)
        if (body[static_cast<std::size_t>(b)] && related(interp, x->relation, a, b))
          out[static_cast<std::size_t>(a)] = true;
    return out;
  }
  const auto& f = std::get<expr::Forall>(c.node);
  const auto body = crisp_extension(interp, *f.child);
  for (int a = 0; a < interp.universe_size; ++a) {
    bool all = true;
    for (int b = 0; b < interp.universe_size && all; ++b)
      if (related(interp, f.relation, a, b) && !body[static_cast<std::size_t>(b)]) all = false;
    out[static_cast<std::size_t>(a)] = all;
  }
  return out;
}

namespace {

int element_of(const CrispInterpretation& interp, const std::string& individual) {
  auto it = interp.individuals.find(individual);
  if (it == interp.individuals.end() || it->second < 0 || it->second >= interp.universe_size)
    throw SymbolError("individual '" + individual + "' has no element");
  return it->second;
}

bool holds(const CrispInterpretation& interp, const Axiom& axiom) {
  if (auto* s = std::get_if<Subsumption>(&axiom)) {
    const auto sub = crisp_extension(interp, *s->sub);
    const auto sup = crisp_extension(interp, *s->sup);
    for (std::size_t i = 0; i < sub.size(); ++i)
      if (sub[i] && !sup[i]) return false;
    return true;
  }
  if (auto* a = std::get_if<ConceptAssertion>(&axiom))
    return crisp_extension(interp, *a->description)[static_cast<std::size_t>(element_of(interp, a->individual))];
  const auto& r = std::get<RoleAssertion>(axiom);
  return related(interp, r.relation, element_of(interp, r.subject), element_of(interp, r.object));
}

}  // namespace

CrispReport crisp_check(const CrispInterpretation& interp, const Ontology& onto) {
  CrispReport report;
  auto visit = [&](const Axiom& a) {
    if (!holds(interp, a)) {
      report.satisfied = false;
      report.violated.push_back(a);
    }
  };
  for (const auto& a : onto.tbox()) visit(a);
  for (const auto& a : onto.abox_concept()) visit(a);
  for (const auto& a : onto.abox_role()) visit(a);
  return report;
}

CrispInterpretation threshold_model(const ModelHandle& model, const IndividualPool& pool, double tau) {
  CrispInterpretation out;
  out.universe_size = pool.size();
  const auto& sig = model.signature;
  for (std::size_t i = 0; i < sig.individuals().size(); ++i)
    out.individuals[sig.individuals()[i]] = static_cast<int>(i);
  for (const auto& c : sig.concepts()) {
    const RowVector m = pool_membership(model, pool, *name(c));
    auto& ext = out.concepts[c];
    for (Eigen::Index e = 0; e < m.size(); ++e)
      if (m(e) >= tau) ext.insert(static_cast<int>(e));
  }
  for (const auto& r : sig.relations()) {
    const Matrix m = pool_relation(model, pool, r);
    auto& ext = out.relations[r];
    for (Eigen::Index x = 0; x < m.rows(); ++x)
      for (Eigen::Index y = 0; y < m.cols(); ++y)
        if (m(x, y) >= tau) ext.insert({static_cast<int>(x), static_cast<int>(y)});
  }
  return out;
}

LookupInterpretation to_lookup(const CrispInterpretation& interp, const Signature& sig) {
  LookupInterpretation out;
  const int u = interp.universe_size;
  out.universe_size = u;
  for (const auto& c : sig.concepts()) {
    RowVector row = RowVector::Zero(u);
    if (auto it = interp.concepts.find(c); it != interp.concepts.end())
      for (int e : it->second) row(e) = 1.0;
    out.concepts.emplace(c, std::move(row));
  }
  for (const auto& r : sig.relations()) {
    Matrix m = Matrix::Zero(u, u);
    if (auto it = interp.relations.find(r); it != interp.relations.end())
      for (const auto& [x, y] : it->second) m(x, y) = 1.0;
    out.relations.emplace(r, std::move(m));
  }
  for (const auto& [ind, e] : interp.individuals) out.individuals.emplace(ind, e);
  return out;
}

CrispInterpretation family_reference_model() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> members = {
      {"a_male", {"Male", "Person"}},
      {"a_person", {"Person"}},
      {"a_female", {"Female", "Person"}},
      {"a_parent", {"Parent", "Person"}},
      {"a_child", {"Child", "Person"}},
      {"a_father", {"Father", "Male", "Parent", "Person"}},
      {"a_boy", {"Boy", "Male", "Child", "Person"}},
      {"a_mother", {"Mother", "Female", "Parent", "Person"}},
      {"a_girl", {"Girl", "Female", "Child", "Person"}},
      {"a_grandma", {"Grandma", "Mother", "Female", "Parent", "Person"}},
  };
  CrispInterpretation m;
  m.universe_size = static_cast<int>(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int e = static_cast<int>(i);
    m.individuals[members[i].first] = e;
    for (const auto& c : members[i].second) m.concepts[c].insert(e);
  }
  m.relations["hasChild"];
  m.relations["hasParent"];
  return m;
}

}  // namespace falcon
