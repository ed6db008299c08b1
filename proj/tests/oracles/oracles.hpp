#pragma once

// Independent reference implementations for tests. Written directly from the
// definitions, sharing no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "falcon/crisp.hpp"
#include "falcon/interpreter.hpp"
#include "falcon/metrics.hpp"
#include "falcon/ontology.hpp"

namespace oracle {

using namespace falcon;

inline double theta(TNorm t, double x, double y) {
  switch (t) {
    case TNorm::Goedel: return x < y ? x : y;
    case TNorm::Product: return x * y;
    case TNorm::Lukasiewicz: return x + y - 1 > 0 ? x + y - 1 : 0;
  }
  return 0;
}
inline double kappa(TNorm t, double x, double y) { return 1 - theta(t, 1 - x, 1 - y); }

/// Textbook recursion: ∃R.D = max_y θ(D(y), R(x,y)), ∀R.D = min_y κ(1 - R(x,y), D(y)).
inline double fuzzy(const LookupInterpretation& I, TNorm t, const Concept& c, int x) {
  const int n = I.universe_size;
  if (auto* p = std::get_if<expr::Name>(&c.node)) return I.concepts.at(p->id)(x);
  if (std::holds_alternative<expr::Top>(c.node)) return 1;
  if (std::holds_alternative<expr::Bottom>(c.node)) return 0;
  if (auto* p = std::get_if<expr::Not>(&c.node)) return 1 - fuzzy(I, t, *p->child, x);
  if (auto* p = std::get_if<expr::And>(&c.node))
    return theta(t, fuzzy(I, t, *p->left, x), fuzzy(I, t, *p->right, x));
  if (auto* p = std::get_if<expr::Or>(&c.node))
    return kappa(t, fuzzy(I, t, *p->left, x), fuzzy(I, t, *p->right, x));
  if (auto* p = std::get_if<expr::Exists>(&c.node)) {
    double best = 0;
    for (int y = 0; y < n; ++y)
      best = std::max(best, theta(t, fuzzy(I, t, *p->child, y), I.relations.at(p->relation)(x, y)));
    return best;
  }
  const auto& f = std::get<expr::Forall>(c.node);
  double worst = 1;
  for (int y = 0; y < n; ++y)
    worst = std::min(worst, kappa(t, 1 - I.relations.at(f.relation)(x, y), fuzzy(I, t, *f.child, y)));
  return worst;
}

/// Set-based classical semantics.
inline std::set<int> extension(const CrispInterpretation& I, const Concept& c) {
  std::set<int> all;
  for (int e = 0; e < I.universe_size; ++e) all.insert(e);
  if (auto* p = std::get_if<expr::Name>(&c.node)) {
    auto it = I.concepts.find(p->id);
    return it == I.concepts.end() ? std::set<int>{} : it->second;
  }
  if (std::holds_alternative<expr::Top>(c.node)) return all;
  if (std::holds_alternative<expr::Bottom>(c.node)) return {};
  std::set<int> out;
  if (auto* p = std::get_if<expr::Not>(&c.node)) {
    const auto inner = extension(I, *p->child);
    std::set_difference(all.begin(), all.end(), inner.begin(), inner.end(), std::inserter(out, out.end()));
    return out;
  }
  if (auto* p = std::get_if<expr::And>(&c.node)) {
    const auto l = extension(I, *p->left), r = extension(I, *p->right);
    std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
    return out;
  }
  if (auto* p = std::get_if<expr::Or>(&c.node)) {
    const auto l = extension(I, *p->left), r = extension(I, *p->right);
    std::set_union(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
    return out;
  }
  const bool exists = std::holds_alternative<expr::Exists>(c.node);
  const std::string& rel = exists ? std::get<expr::Exists>(c.node).relation : std::get<expr::Forall>(c.node).relation;
  const Concept& body = exists ? *std::get<expr::Exists>(c.node).child : *std::get<expr::Forall>(c.node).child;
  const auto b = extension(I, body);
  std::set<std::pair<int, int>> edges;
  if (auto it = I.relations.find(rel); it != I.relations.end()) edges = it->second;
  for (int x : all) {
    bool any = false, every = true;
    for (const auto& [s, o] : edges) {
      if (s != x) continue;
      if (b.contains(o)) any = true;
      else every = false;
    }
    if (exists ? any : every) out.insert(x);
  }
  return out;
}

/// Indices (into tbox, then abox_concept, then abox_role) of violated axioms.
inline std::vector<int> violations(const CrispInterpretation& I, const Ontology& o) {
  std::vector<int> out;
  int i = 0;
  for (const auto& s : o.tbox()) {
    const auto sub = extension(I, *s.sub), sup = extension(I, *s.sup);
    if (!std::includes(sup.begin(), sup.end(), sub.begin(), sub.end())) out.push_back(i);
    ++i;
  }
  for (const auto& a : o.abox_concept()) {
    if (!extension(I, *a.description).contains(I.individuals.at(a.individual))) out.push_back(i);
    ++i;
  }
  for (const auto& a : o.abox_role()) {
    auto it = I.relations.find(a.relation);
    const std::pair<int, int> edge{I.individuals.at(a.subject), I.individuals.at(a.object)};
    if (it == I.relations.end() || !it->second.contains(edge)) out.push_back(i);
    ++i;
  }
  return out;
}

inline double pairwise_auc(const std::vector<ScoredExample>& ex) {
  double wins = 0, pairs = 0;
  for (const auto& p : ex)
    for (const auto& n : ex) {
      if (!p.positive || n.positive) continue;
      pairs += 1;
      wins += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
    }
  return wins / pairs;
}

/// Σ over distinct thresholds (descending) of ΔRecall · Precision, counting from scratch.
inline double threshold_aupr(const std::vector<ScoredExample>& ex) {
  std::set<double, std::greater<>> cuts;
  double positives = 0;
  for (const auto& e : ex) {
    cuts.insert(e.score);
    positives += e.positive;
  }
  double area = 0, prev = 0;
  for (double t : cuts) {
    double tp = 0, predicted = 0;
    for (const auto& e : ex)
      if (e.score >= t) {
        predicted += 1;
        tp += e.positive;
      }
    area += (tp / positives - prev) * (tp / predicted);
    prev = tp / positives;
  }
  return area;
}

inline double grid_fmax(const std::vector<ScoredExample>& ex) {
  double best = 0;
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    double tp = 0, fp = 0, fn = 0;
    for (const auto& e : ex) {
      if (e.score >= t) (e.positive ? tp : fp) += 1;
      else if (e.positive) fn += 1;
    }
    if (tp > 0) {
      const double p = tp / (tp + fp), r = tp / (tp + fn);
      best = std::max(best, 2 * p * r / (p + r));
    }
  }
  return best;
}

/// Sort the surviving candidates, true object after equal scores, and read off its position.
inline int sorted_rank(const RankingQuery& q, const std::vector<double>& scores, bool filtered) {
  std::vector<std::pair<double, int>> kept;
  for (std::size_t i = 0; i < q.candidates.size(); ++i) {
    const int c = q.candidates[i];
    if (filtered && c != q.object && q.known_true.contains(c)) continue;
    kept.emplace_back(scores[i], c);
  }
  std::sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return (a.second != q.object) && (b.second == q.object);
  });
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (kept[i].second == q.object) return static_cast<int>(i) + 1;
  return -1;
}

// ---- random instances ------------------------------------------------------

struct Vocabulary {
  std::vector<std::string> concepts, relations, individuals;
};

inline Vocabulary random_vocabulary(std::mt19937_64& rng, int max_c = 4, int max_r = 2, int max_i = 5) {
  Vocabulary v;
  const int nc = std::uniform_int_distribution<int>(1, max_c)(rng);
  const int nr = std::uniform_int_distribution<int>(1, max_r)(rng);
  const int ni = std::uniform_int_distribution<int>(1, max_i)(rng);
  for (int i = 0; i < nc; ++i) v.concepts.push_back("C" + std::to_string(i));
  for (int i = 0; i < nr; ++i) v.relations.push_back("r" + std::to_string(i));
  for (int i = 0; i < ni; ++i) v.individuals.push_back("i" + std::to_string(i));
  return v;
}

inline ConceptPtr random_concept(std::mt19937_64& rng, const Vocabulary& v, int depth) {
  auto pick = [&](const std::vector<std::string>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
  };
  const int kind = depth <= 0 ? std::uniform_int_distribution<int>(0, 5)(rng)
                              : std::uniform_int_distribution<int>(0, 11)(rng);
  switch (kind) {
    case 0: return top();
    case 1: return bottom();
    case 2: case 3: case 4: case 5: return name(pick(v.concepts));
    case 6: return negate(random_concept(rng, v, depth - 1));
    case 7: return conj(random_concept(rng, v, depth - 1), random_concept(rng, v, depth - 1));
    case 8: return disj(random_concept(rng, v, depth - 1), random_concept(rng, v, depth - 1));
    case 9: case 10: return some(pick(v.relations), random_concept(rng, v, depth - 1));
    default: return only(pick(v.relations), random_concept(rng, v, depth - 1));
  }
}

/// Random crisp interpretation over a universe of `size` elements; individuals
/// land on random elements.
inline CrispInterpretation random_crisp(std::mt19937_64& rng, const Vocabulary& v, int size) {
  CrispInterpretation I;
  I.universe_size = size;
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> elem(0, size - 1);
  for (const auto& c : v.concepts) {
    auto& ext = I.concepts[c];
    for (int e = 0; e < size; ++e)
      if (coin(rng)) ext.insert(e);
  }
  for (const auto& r : v.relations) {
    auto& ext = I.relations[r];
    for (int x = 0; x < size; ++x)
      for (int y = 0; y < size; ++y)
        if (coin(rng)) ext.insert({x, y});
  }
  for (const auto& i : v.individuals) I.individuals[i] = elem(rng);
  return I;
}

/// Random axioms over the vocabulary, every symbol registered up front.
inline Ontology random_ontology(std::mt19937_64& rng, const Vocabulary& v, int axioms, int depth = 2) {
  Ontology o;
  for (const auto& c : v.concepts) o.signature.add_concept(c);
  for (const auto& r : v.relations) o.signature.add_relation(r);
  for (const auto& i : v.individuals) o.signature.add_individual(i);
  auto pick = [&](const std::vector<std::string>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
  };
  for (int k = 0; k < axioms; ++k) {
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: case 1: o.add(Subsumption{random_concept(rng, v, depth), random_concept(rng, v, depth)}); break;
      case 2: o.add(ConceptAssertion{random_concept(rng, v, depth), pick(v.individuals)}); break;
      default: o.add(RoleAssertion{pick(v.relations), pick(v.individuals), pick(v.individuals)});
    }
  }
  return o;
}

/// Keeps only the axioms that hold in `I`, so `I` is a model of the result.
inline Ontology satisfied_part(const Ontology& o, const CrispInterpretation& I) {
  Ontology out;
  out.signature = o.signature;
  const auto bad = violations(I, o);
  int i = 0;
  auto keep = [&](const Axiom& a) {
    if (std::find(bad.begin(), bad.end(), i++) == bad.end()) out.add(a);
  };
  for (const auto& a : o.tbox()) keep(a);
  for (const auto& a : o.abox_concept()) keep(a);
  for (const auto& a : o.abox_role()) keep(a);
  return out;
}

/// Lookup tables with dyadic degrees (multiples of 1/8), for which every
/// t-norm, conorm and negation step is exact in binary floating point.
inline LookupInterpretation random_dyadic_lookup(std::mt19937_64& rng, const Vocabulary& v, int size) {
  LookupInterpretation I;
  I.universe_size = size;
  std::uniform_int_distribution<int> eighth(0, 8);
  for (const auto& c : v.concepts) {
    RowVector row(size);
    for (int e = 0; e < size; ++e) row(e) = eighth(rng) / 8.0;
    I.concepts.emplace(c, row);
  }
  for (const auto& r : v.relations) {
    Matrix m(size, size);
    for (int x = 0; x < size; ++x)
      for (int y = 0; y < size; ++y) m(x, y) = eighth(rng) / 8.0;
    I.relations.emplace(r, m);
  }
  std::uniform_int_distribution<int> elem(0, size - 1);
  for (const auto& i : v.individuals) I.individuals[i] = elem(rng);
  return I;
}

/// Central differences written out independently of the library helper.
template <class F>
std::vector<Matrix> central_differences(F&& loss, ParamStore params, double h = 1e-5) {
  std::vector<Matrix> out;
  for (std::size_t s = 0; s < params.size(); ++s) {
    Matrix g = Matrix::Zero(params[s].rows(), params[s].cols());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      const double keep = params.at(s).data()[k];
      params.at(s).data()[k] = keep + h;
      const double up = loss(params);
      params.at(s).data()[k] = keep - h;
      const double down = loss(params);
      params.at(s).data()[k] = keep;
      g.data()[k] = (up - down) / (2 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Smallest gap between the two largest entries of any row fed to a max node.
inline double min_tie_gap(const Tape& tape) {
  double gap = INFINITY;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const NodeId n{static_cast<int>(i)};
    if (tape.op(n) != Op::RowMax) continue;
    const Matrix& in = tape.value(tape.input(n));
    if (in.cols() < 2) continue;
    for (Eigen::Index r = 0; r < in.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(in.cols()));
      for (Eigen::Index c = 0; c < in.cols(); ++c) row[static_cast<std::size_t>(c)] = in(r, c);
      std::partial_sort(row.begin(), row.begin() + 2, row.end(), std::greater<>());
      gap = std::min(gap, row[0] - row[1]);
    }
  }
  return gap;
}

}  // namespace oracle
