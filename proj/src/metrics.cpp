#include "falcon/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace falcon {

double mae_entailed(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("mae over no scores");
  double total = 0;
  for (double s : scores) total += 1.0 - s;
  return total / static_cast<double>(scores.size());
}

namespace {

std::pair<std::size_t, std::size_t> class_counts(std::span<const ScoredExample> ex) {
  const auto pos = static_cast<std::size_t>(
      std::count_if(ex.begin(), ex.end(), [](const ScoredExample& e) { return e.positive; }));
  if (pos == 0 || pos == ex.size())
    throw std::invalid_argument("metric needs both positive and negative examples");
  return {pos, ex.size() - pos};
}

std::vector<ScoredExample> by_score_desc(std::span<const ScoredExample> ex) {
  std::vector<ScoredExample> v(ex.begin(), ex.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const ScoredExample& a, const ScoredExample& b) { return a.score > b.score; });
  return v;
}

}  // namespace

double auc(std::span<const ScoredExample> examples) {
  const auto [pos, neg] = class_counts(examples);
  std::vector<ScoredExample> v(examples.begin(), examples.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const ScoredExample& a, const ScoredExample& b) { return a.score < b.score; });
  // Rank-sum with average ranks for ties; ranks are 1-based, kept doubled to stay integral.
  double doubled_rank_sum = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j].score == v[i].score) ++j;
    const double doubled_avg = static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (v[k].positive) doubled_rank_sum += doubled_avg;
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double wins = (doubled_rank_sum - p * (p + 1)) / 2.0;
  return wins / (p * static_cast<double>(neg));
}

double aupr(std::span<const ScoredExample> examples) {
  const auto [pos, neg] = class_counts(examples);
  (void)neg;
  const auto v = by_score_desc(examples);
  double area = 0, prev_recall = 0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j].score == v[i].score) {
      if (v[j].positive) ++tp;
      ++j;
    }
    seen = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

double fmax(std::span<const ScoredExample> examples, int grid) {
  class_counts(examples);
  if (grid < 1) throw std::invalid_argument("fmax grid must be positive");
  double best = 0;
  for (int i = 0; i <= grid; ++i) {
    const double tau = static_cast<double>(i) / static_cast<double>(grid);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& e : examples) {
      const bool predicted = e.score >= tau;
      if (predicted && e.positive) ++tp;
      else if (predicted) ++fp;
      else if (e.positive) ++fn;
    }
    if (tp == 0) continue;
    best = std::max(best, 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn));
  }
  return best;
}

int rank_of(const RankingQuery& q, std::span<const double> scores, RankMode mode) {
  if (scores.size() != q.candidates.size())
    throw std::invalid_argument("rank: one score per candidate required");
  auto at = std::find(q.candidates.begin(), q.candidates.end(), q.object);
  if (at == q.candidates.end()) throw std::invalid_argument("rank: true object is not a candidate");
  const double target = scores[static_cast<std::size_t>(at - q.candidates.begin())];
  int rank = 1;
  for (std::size_t i = 0; i < q.candidates.size(); ++i) {
    const int c = q.candidates[i];
    if (c == q.object) continue;
    if (mode == RankMode::Filtered && q.known_true.contains(c)) continue;
    if (scores[i] >= target) ++rank;
  }
  return rank;
}

RankMetrics rank_metrics(std::span<const RankingQuery> queries, const CandidateScorer& scorer,
                         RankMode mode) {
  if (queries.empty()) throw std::invalid_argument("rank metrics over no queries");
  RankMetrics m;
  for (const auto& q : queries) {
    const auto scores = scorer(q);
    const int r = rank_of(q, scores, mode);
    m.mrr += 1.0 / r;
    m.hits3 += r <= 3;
    m.hits10 += r <= 10;
    m.hits100 += r <= 100;
  }
  const double n = static_cast<double>(queries.size());
  m.mrr /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  m.hits100 /= n;
  return m;
}

CandidateScorer model_scorer(const ModelHandle& model) {
  return [&model](const RankingQuery& q) {
    const int r = static_cast<int>(model.signature.index_of(SymbolKind::Relation, q.relation));
    const std::vector<int> rels(q.candidates.size(), r);
    const std::vector<int> subs(q.candidates.size(), q.subject);
    Tape tape;
    NeuralBackend be(tape, model);
    const Matrix& s = tape.value(be.triple_logits(rels, subs, q.candidates));
    return std::vector<double>(s.data(), s.data() + s.size());
  };
}

double random_mrr(int n) {
  if (n < 1) throw std::invalid_argument("random mrr needs at least one candidate");
  double h = 0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h / n;
}

double random_mrr(std::span<const RankingQuery> queries, RankMode mode) {
  if (queries.empty()) throw std::invalid_argument("random mrr over no queries");
  double total = 0;
  for (const auto& q : queries) {
    int n = static_cast<int>(q.candidates.size());
    if (mode == RankMode::Filtered)
      for (int c : q.candidates)
        if (c != q.object && q.known_true.contains(c)) --n;
    total += random_mrr(n);
  }
  return total / static_cast<double>(queries.size());
}

SyntheticKg synthetic_transitive_kg(std::uint64_t seed, int chains, int chain_length,
                                    double test_share) {
  if (chains < 1 || chain_length < 2) throw std::invalid_argument("kg needs chains of length >= 2");
  SyntheticKg kg;
  auto id = [&](int c, int i) { return "e" + std::to_string(c * chain_length + i); };
  for (int c = 0; c < chains; ++c)
    for (int i = 0; i < chain_length; ++i) kg.train.signature.add_individual(id(c, i));
  kg.train.signature.add_relation("parentOf");
  kg.train.signature.add_relation("ancestorOf");
  std::vector<RoleAssertion> ancestors;
  for (int c = 0; c < chains; ++c) {
    for (int i = 0; i + 1 < chain_length; ++i) kg.train.add(RoleAssertion{"parentOf", id(c, i), id(c, i + 1)});
    for (int i = 0; i < chain_length; ++i)
      for (int j = i + 1; j < chain_length; ++j) ancestors.push_back({"ancestorOf", id(c, i), id(c, j)});
  }
  std::mt19937_64 rng(seed);
  std::shuffle(ancestors.begin(), ancestors.end(), rng);
  const auto held = static_cast<std::size_t>(test_share * static_cast<double>(ancestors.size()));
  for (std::size_t k = 0; k < ancestors.size(); ++k) {
    if (k < held) kg.test.push_back(ancestors[k]);
    else kg.train.add(ancestors[k]);
  }
  return kg;
}

std::vector<RankingQuery> ranking_queries(const Ontology& onto, std::span<const RoleAssertion> test) {
  const auto& sig = onto.signature;
  auto idx = [&](const std::string& ind) {
    return static_cast<int>(sig.index_of(SymbolKind::Individual, ind));
  };
  std::map<std::pair<std::string, int>, std::set<int>> truth;
  for (const auto& a : onto.abox_role()) truth[{a.relation, idx(a.subject)}].insert(idx(a.object));
  for (const auto& a : test) truth[{a.relation, idx(a.subject)}].insert(idx(a.object));
  std::vector<int> all(sig.individuals().size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<RankingQuery> out;
  for (const auto& a : test) {
    RankingQuery q{a.relation, idx(a.subject), idx(a.object), all, {}};
    q.known_true = truth[{a.relation, q.subject}];
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> disjoint_pairs(const Ontology& onto) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& ax : onto.tbox()) {
    if (!std::holds_alternative<expr::Bottom>(ax.sup->node)) continue;
    auto* both = std::get_if<expr::And>(&ax.sub->node);
    if (!both) continue;
    auto* l = std::get_if<expr::Name>(&both->left->node);
    auto* r = std::get_if<expr::Name>(&both->right->node);
    if (l && r) out.emplace_back(l->id, r->id);
  }
  return out;
}

Injection inject_inconsistency(const Ontology& onto, int n, std::mt19937_64& rng) {
  if (n < 0) throw std::invalid_argument("injection count must be non-negative");
  Injection out{onto, {}};
  if (n == 0) return out;
  const auto pairs = disjoint_pairs(onto);
  if (pairs.empty()) throw std::invalid_argument("no disjointness axiom to contradict");
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  for (int i = 0; i < n; ++i) {
    std::string id = "inc_" + std::to_string(i);
    while (out.ontology.signature.kind_of(id)) id += "_";
    const auto& [a, b] = pairs[pick(rng)];
    for (const auto& c : {a, b}) {
      ConceptAssertion assertion{name(c), id};
      out.ontology.add(assertion);
      out.manifest.push_back(std::move(assertion));
    }
  }
  return out;
}

namespace {

/// Told superclasses of every concept name, following atomic TBox edges.
std::map<std::string, std::set<std::string>> told_closure(const Ontology& onto) {
  std::map<std::string, std::set<std::string>> direct;
  for (const auto& ax : onto.tbox()) {
    auto* l = std::get_if<expr::Name>(&ax.sub->node);
    auto* r = std::get_if<expr::Name>(&ax.sup->node);
    if (l && r) direct[l->id].insert(r->id);
  }
  std::map<std::string, std::set<std::string>> out;
  for (const auto& c : onto.signature.concepts()) {
    auto& seen = out[c];
    std::vector<std::string> stack(direct[c].begin(), direct[c].end());
    while (!stack.empty()) {
      auto next = stack.back();
      stack.pop_back();
      if (!seen.insert(next).second) continue;
      for (const auto& up : direct[next]) stack.push_back(up);
    }
    seen.erase(c);
  }
  return out;
}

}  // namespace

std::vector<Subsumption> derived_name_subsumptions(const Ontology& onto) {
  const auto closure = told_closure(onto);
  std::vector<Subsumption> out;
  for (const auto& a : onto.signature.concepts()) {
    for (const auto& b : onto.signature.concepts()) {
      if (!closure.at(a).contains(b)) continue;
      Subsumption s{name(a), name(b)};
      const bool stated = std::any_of(onto.tbox().begin(), onto.tbox().end(),
                                      [&](const Subsumption& t) { return t == s; });
      if (!stated) out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<Subsumption> unprovable_name_subsumptions(const Ontology& onto,
                                                      const CrispInterpretation& reference) {
  std::vector<Subsumption> out;
  for (const auto& a : onto.signature.concepts()) {
    for (const auto& b : onto.signature.concepts()) {
      if (a == b) continue;
      Subsumption s{name(a), name(b)};
      Ontology probe;
      probe.add(s);
      if (!crisp_check(reference, probe).satisfied) out.push_back(std::move(s));
    }
  }
  return out;
}

LabeledAxioms family_labeled_axioms() {
  const Ontology family = builtin_family();
  LabeledAxioms out;
  out.entailed = derived_name_subsumptions(family);
  for (const char* text : {"(Female and Child) SubClassOf Girl",
                           "((some hasChild.Person) and Female) SubClassOf Mother"})
    out.entailed.push_back(std::get<Subsumption>(parse_axiom(text)));
  out.unprovable = unprovable_name_subsumptions(family, family_reference_model());
  return out;
}

}  // namespace falcon
