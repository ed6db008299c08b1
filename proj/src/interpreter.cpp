#include "falcon/interpreter.hpp"

#include <cmath>

#include "falcon/log.hpp"

namespace falcon {

Vector ModelHandle::individual_embedding(const std::string& individual) const {
  const auto idx = signature.index_of(SymbolKind::Individual, individual);
  return params[layout.individual_emb].col(static_cast<Eigen::Index>(idx));
}

ModelHandle init_model(const Signature& sig, const TrainConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  ModelHandle m;
  m.signature = sig;
  m.config = cfg;
  m.seed = seed;
  const int n = cfg.dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(n));
  std::mt19937_64 rng(seed);
  const double emb_bound = cfg.emb_init > 0 ? cfg.emb_init : bound;
  std::uniform_real_distribution<double> u(-emb_bound, emb_bound);
  auto table = [&](std::size_t cols) {
    Matrix t(n, static_cast<Eigen::Index>(cols));
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = u(rng);
    return t;
  };
  m.layout.concept_emb = m.params.add("emb.concepts", table(sig.concepts().size()));
  m.layout.relation_emb = m.params.add("emb.relations", table(sig.relations().size()));
  m.layout.individual_emb = m.params.add("emb.individuals", table(sig.individuals().size()));

  MlpSpec spec = default_mlp(n);
  if (!cfg.hidden.empty()) spec.hidden_dims = cfg.hidden;
  m.layout.concept_spec = spec;
  m.layout.relation_spec = spec;
  m.layout.concept_mlp = add_mlp(m.params, "concept_mlp", spec, rng, bound, cfg.mlp_input_gain);
  m.layout.relation_mlp = add_mlp(m.params, "relation_mlp", spec, rng, bound, cfg.mlp_input_gain);
  return m;
}

Matrix IndividualPool::all() const {
  Matrix out(named.cols() ? named.rows() : anonymous.rows(), named.cols() + anonymous.cols());
  out << named, anonymous;
  return out;
}

IndividualPool sample_pool(const ModelHandle& model, std::mt19937_64& rng, int n_gauss,
                           int n_uniform, double gauss_std) {
  IndividualPool pool;
  pool.named = model.named_embeddings();
  const int n = model.dim();
  const auto named = pool.named.cols();
  if (n_gauss > 0 && named == 0) {
    log_warn("no named individuals to jitter; drawing " + std::to_string(n_gauss) +
             " uniform samples instead");
    n_uniform += n_gauss;
    n_gauss = 0;
  }
  pool.anonymous.resize(n, n_gauss + n_uniform);
  std::uniform_int_distribution<Eigen::Index> pick(0, named > 0 ? named - 1 : 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  for (int k = 0; k < n_gauss; ++k) {
    const auto base = pick(rng);
    pool.gauss_base.push_back(static_cast<int>(base));
    for (int d = 0; d < n; ++d) pool.anonymous(d, k) = pool.named(d, base) + gauss_std * noise(rng);
  }
  for (int k = n_gauss; k < n_gauss + n_uniform; ++k)
    for (int d = 0; d < n; ++d) pool.anonymous(d, k) = box(rng);
  return pool;
}

IndividualPool eval_pool(const ModelHandle& model, std::uint64_t seed, int n_uniform) {
  std::mt19937_64 rng(seed);
  return sample_pool(model, rng, 0, n_uniform);
}

NeuralBackend::NeuralBackend(Tape& tape, const ModelHandle& model) : tape_(tape), model_(model) {
  const auto& L = model.layout;
  concepts_ = tape.param(model.params, L.concept_emb);
  relations_ = tape.param(model.params, L.relation_emb);
  individuals_ = tape.param(model.params, L.individual_emb);
  concept_net_ = bind_mlp(tape, model.params, L.concept_spec, L.concept_mlp);
  relation_net_ = bind_mlp(tape, model.params, L.relation_spec, L.relation_mlp);
}

NodeId NeuralBackend::pool_points(const IndividualPool& pool) {
  if (pool.anonymous.cols() == 0) return individuals_;
  const auto g = static_cast<Eigen::Index>(pool.gauss_base.size());
  if (g == 0) return tape_.concat_cols(individuals_, tape_.constant(pool.anonymous));
  Matrix noise = pool.anonymous.leftCols(g);
  for (Eigen::Index k = 0; k < g; ++k) noise.col(k) -= pool.named.col(pool.gauss_base[k]);
  NodeId jittered = tape_.add(tape_.gather_cols(individuals_, pool.gauss_base), tape_.constant(noise));
  NodeId out = tape_.concat_cols(individuals_, jittered);
  if (pool.anonymous.cols() > g)
    out = tape_.concat_cols(out, tape_.constant(pool.anonymous.rightCols(pool.anonymous.cols() - g)));
  return out;
}

NodeId NeuralBackend::concept_column(const std::string& name) {
  if (auto it = concept_cols_.find(name); it != concept_cols_.end()) return it->second;
  const int idx = static_cast<int>(model_.signature.index_of(SymbolKind::Concept, name));
  NodeId col = tape_.gather_cols(concepts_, {idx});
  concept_cols_.emplace(name, col);
  return col;
}

NodeId NeuralBackend::relation_column(const std::string& name) {
  if (auto it = relation_cols_.find(name); it != relation_cols_.end()) return it->second;
  const int idx = static_cast<int>(model_.signature.index_of(SymbolKind::Relation, name));
  NodeId col = tape_.gather_cols(relations_, {idx});
  relation_cols_.emplace(name, col);
  return col;
}

NodeId NeuralBackend::concept_degrees(const std::string& concept_name, NodeId points) {
  NodeId logits = mlp_apply_pair(tape_, concept_net_, concept_column(concept_name), points, Pairing::Outer);
  return tape_.sigmoid(logits);
}

NodeId NeuralBackend::relation_logits(const std::string& relation, NodeId xs, NodeId ys) {
  NodeId shifted = tape_.add_col_broadcast(xs, relation_column(relation));
  NodeId flat = mlp_apply_pair(tape_, relation_net_, shifted, ys, Pairing::Outer);
  return tape_.reshape(flat, count(xs), count(ys));
}

NodeId NeuralBackend::relation_degrees(const std::string& relation, NodeId xs, NodeId ys) {
  return tape_.sigmoid(relation_logits(relation, xs, ys));
}

NodeId NeuralBackend::triple_logits(const std::vector<int>& relations,
                                    const std::vector<int>& subjects,
                                    const std::vector<int>& objects) {
  NodeId shifted = tape_.add(tape_.gather_cols(individuals_, subjects),
                             tape_.gather_cols(relations_, relations));
  NodeId obj = tape_.gather_cols(individuals_, objects);
  return mlp_apply_pair(tape_, relation_net_, shifted, obj, Pairing::Zip);
}

int NeuralBackend::column_of(const std::string& individual) const {
  return static_cast<int>(model_.signature.index_of(SymbolKind::Individual, individual));
}

LookupBackend::Points LookupBackend::universe() const {
  Points p(static_cast<std::size_t>(interp_.universe_size));
  for (int i = 0; i < interp_.universe_size; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

NodeId LookupBackend::concept_degrees(const std::string& concept_name, const Points& p) {
  auto it = interp_.concepts.find(concept_name);
  if (it == interp_.concepts.end()) throw SymbolError("unknown concept '" + concept_name + "'");
  Matrix row(1, static_cast<Eigen::Index>(p.size()));
  for (std::size_t k = 0; k < p.size(); ++k) row(0, static_cast<Eigen::Index>(k)) = it->second(p[k]);
  return tape_.constant(std::move(row));
}

NodeId LookupBackend::relation_degrees(const std::string& relation, const Points& xs,
                                       const Points& ys) {
  auto it = interp_.relations.find(relation);
  if (it == interp_.relations.end()) throw SymbolError("unknown relation '" + relation + "'");
  Matrix m(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second(xs[i], ys[j]);
  return tape_.constant(std::move(m));
}

int LookupBackend::column_of(const std::string& individual) const {
  auto it = interp_.individuals.find(individual);
  if (it == interp_.individuals.end())
    throw SymbolError("unassigned individual '" + individual + "'");
  return it->second;
}

double membership(const ModelHandle& model, const Vector& x, const Concept& c,
                  const IndividualPool& pool) {
  if (x.size() != model.dim()) throw std::invalid_argument("membership: point has wrong dimension");
  Tape tape;
  NeuralBackend be(tape, model);
  Evaluator ev(tape, be, model.tnorm(), be.pool_points(pool));
  NodeId q = be.constant_points(x);
  return tape.value(ev.on_points(c, q))(0, 0);
}

double relation_membership(const ModelHandle& model, const Vector& x, const Vector& y,
                           const std::string& relation) {
  if (x.size() != model.dim() || y.size() != model.dim())
    throw std::invalid_argument("relation_membership: point has wrong dimension");
  Tape tape;
  NeuralBackend be(tape, model);
  return tape.value(be.relation_degrees(relation, be.constant_points(x), be.constant_points(y)))(0, 0);
}

RowVector pool_membership(const ModelHandle& model, const IndividualPool& pool, const Concept& c) {
  Tape tape;
  NeuralBackend be(tape, model);
  Evaluator ev(tape, be, model.tnorm(), be.pool_points(pool));
  return tape.value(ev.on_pool(c));
}

RowVector pool_membership(const LookupInterpretation& interp, TNorm tnorm, const Concept& c) {
  Tape tape;
  LookupBackend be(tape, interp);
  Evaluator ev(tape, be, tnorm, be.universe());
  return tape.value(ev.on_pool(c));
}

Matrix pool_relation(const ModelHandle& model, const IndividualPool& pool,
                     const std::string& relation) {
  Tape tape;
  NeuralBackend be(tape, model);
  NodeId pts = be.pool_points(pool);
  return tape.value(be.relation_degrees(relation, pts, pts));
}

}  // namespace falcon
