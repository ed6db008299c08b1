#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "falcon/config.hpp"
#include "falcon/fuzzy.hpp"
#include "falcon/mlp.hpp"
#include "falcon/ontology.hpp"
#include "falcon/params.hpp"
#include "falcon/tape.hpp"

namespace falcon {

/// Where each part of a generated model lives inside its ParamStore.
struct ModelLayout {
  std::size_t concept_emb = 0;     // dim × |concepts|
  std::size_t relation_emb = 0;    // dim × |relations|
  std::size_t individual_emb = 0;  // dim × |individuals|
  MlpSpec concept_spec, relation_spec;
  MlpSlots concept_mlp, relation_mlp;
};

/// One generated fuzzy model: symbol embeddings plus the two membership
/// networks. Named individual `i` is column `i` of the individual table;
/// anonymous individuals are their own embedding.
struct ModelHandle {
  Signature signature;
  ParamStore params;
  ModelLayout layout;
  TrainConfig config;
  std::uint64_t seed = 0;

  int dim() const { return config.dim; }
  TNorm tnorm() const { return config.tnorm; }
  Vector individual_embedding(const std::string& individual) const;
  Matrix named_embeddings() const { return params[layout.individual_emb]; }
};

/// Fresh model: embeddings ~ U(-b, b) with b = emb_init (1/sqrt(n) when 0), MLP
/// weights ~ U(-1/sqrt(n), 1/sqrt(n)) with the first layer times mlp_input_gain, biases 0.
ModelHandle init_model(const Signature& sig, const TrainConfig& cfg, std::uint64_t seed);

/// Finite sample of the universe: every named individual plus anonymous
/// points of the embedding space.
struct IndividualPool {
  Matrix named;      // dim × |named|, snapshot of the individual table
  Matrix anonymous;  // dim × k
  /// Named column each leading Gaussian sample was drawn around. Those
  /// samples stay attached to the embedding table during training.
  std::vector<int> gauss_base;

  int size() const { return static_cast<int>(named.cols() + anonymous.cols()); }
  Matrix all() const;
};

/// Named individuals plus `n_gauss` jittered copies of random named embeddings
/// (N(0, gauss_std²) per coordinate) and `n_uniform` points from U(-1,1)^n.
/// With no named individuals the Gaussian quota is drawn uniformly instead.
IndividualPool sample_pool(const ModelHandle& model, std::mt19937_64& rng, int n_gauss,
                           int n_uniform, double gauss_std = 0.1);

/// Query-time pool: named individuals plus `n_uniform` points, seeded by `seed`.
IndividualPool eval_pool(const ModelHandle& model, std::uint64_t seed, int n_uniform);

/// A source of name-level memberships over some representation of points.
template <class B>
concept MembershipBackend = requires(B& b, const std::string& s, const typename B::Points& p) {
  { b.count(p) } -> std::convertible_to<int>;
  { b.concept_degrees(s, p) } -> std::same_as<NodeId>;
  { b.relation_degrees(s, p, p) } -> std::same_as<NodeId>;
  { b.column_of(s) } -> std::convertible_to<int>;
};

/// Neural interpretation: m(x, C) = σ(MLP(f_e(C), x)), m((x,y), R) = σ(MLP(x + f_e(R), y)).
class NeuralBackend {
 public:
  using Points = NodeId;  // dim × P

  NeuralBackend(Tape& tape, const ModelHandle& model);

  /// Named individuals (differentiable) followed by the pool's anonymous points.
  NodeId pool_points(const IndividualPool& pool);
  NodeId constant_points(const Matrix& xs) { return tape_.constant(xs); }

  int count(NodeId points) const { return static_cast<int>(tape_.value(points).cols()); }
  NodeId concept_degrees(const std::string& concept_name, NodeId points);
  NodeId relation_logits(const std::string& relation, NodeId xs, NodeId ys);
  NodeId relation_degrees(const std::string& relation, NodeId xs, NodeId ys);
  /// Pre-sigmoid scores of (subjects[k], relations[k], objects[k]) triples, 1×K.
  NodeId triple_logits(const std::vector<int>& relations, const std::vector<int>& subjects,
                       const std::vector<int>& objects);
  int column_of(const std::string& individual) const;

  Tape& tape() { return tape_; }

 private:
  NodeId concept_column(const std::string& name);
  NodeId relation_column(const std::string& name);

  Tape& tape_;
  const ModelHandle& model_;
  NodeId concepts_, relations_, individuals_;
  MlpNodes concept_net_, relation_net_;
  std::unordered_map<std::string, NodeId> concept_cols_, relation_cols_;
};

/// Finite interpretation given by explicit membership tables over elements
/// 0..universe_size-1. Used to encode classical models exactly.
struct LookupInterpretation {
  int universe_size = 0;
  std::unordered_map<std::string, RowVector> concepts;  // 1×U each
  std::unordered_map<std::string, Matrix> relations;    // U×U each
  std::unordered_map<std::string, int> individuals;     // named individual -> element
};

class LookupBackend {
 public:
  using Points = std::vector<int>;

  LookupBackend(Tape& tape, const LookupInterpretation& interp) : tape_(tape), interp_(interp) {}

  Points universe() const;
  int count(const Points& p) const { return static_cast<int>(p.size()); }
  NodeId concept_degrees(const std::string& concept_name, const Points& p);
  NodeId relation_degrees(const std::string& relation, const Points& xs, const Points& ys);
  int column_of(const std::string& individual) const;

 private:
  Tape& tape_;
  const LookupInterpretation& interp_;
};

/// Recursive membership evaluation over a finite scan pool.
///
/// Each node is evaluated with a polarity: the negative polarity of C is
/// ν(m(x, C)), and negation only flips polarity. Connectives are written with
/// θ and ν alone (κ(x,y) = ν(θ(ν(x),ν(y)))), and ∀R.D is evaluated as
/// ν(max_y θ(ν(m(y,D)), m((x,y),R))). This makes ¬¬C, De Morgan pairs and the
/// ∀/¬∃¬ duality produce bit-identical degrees.
template <MembershipBackend Backend>
class Evaluator {
 public:
  using Points = typename Backend::Points;

  Evaluator(Tape& tape, Backend& backend, TNorm tnorm, Points pool)
      : tape_(tape), backend_(backend), tnorm_(tnorm), pool_(std::move(pool)) {}

  /// 1×P degrees of every pool element.
  NodeId on_pool(const Concept& c) { return eval(c, true, nullptr); }
  /// 1×Q degrees of query points; quantifiers still scan the pool.
  NodeId on_points(const Concept& c, const Points& queries) { return eval(c, true, &queries); }
  /// P×P degrees of every pool pair.
  NodeId relation_on_pool(const std::string& r) {
    auto it = relation_memo_.find(r);
    if (it != relation_memo_.end()) return it->second;
    NodeId n = backend_.relation_degrees(r, pool_, pool_);
    relation_memo_.emplace(r, n);
    return n;
  }

  int pool_size() const { return backend_.count(pool_); }
  const Points& pool() const { return pool_; }
  Backend& backend() { return backend_; }
  Tape& tape() { return tape_; }
  TNorm tnorm() const { return tnorm_; }

 private:
  NodeId constant_row(double v, int n) { return tape_.constant(Matrix::Constant(1, n, v)); }

  NodeId name_on(const std::string& id, bool positive, const Points* q) {
    if (q) {
      NodeId m = backend_.concept_degrees(id, *q);
      return positive ? m : tape_.one_minus(m);
    }
    auto& memo = positive ? pos_memo_ : neg_memo_;
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    NodeId m;
    if (positive) {
      m = backend_.concept_degrees(id, pool_);
    } else {
      m = tape_.one_minus(name_on(id, true, nullptr));
    }
    memo.emplace(id, m);
    return m;
  }

  /// max_y θ(m(y, body), m((x,y), R)) as a 1×|x| row.
  NodeId scan(const std::string& r, const Concept& body, bool body_positive, const Points* q) {
    if (pool_size() == 0) throw std::invalid_argument("quantifier over an empty pool");
    NodeId b = eval(body, body_positive, nullptr);
    NodeId rel = q ? backend_.relation_degrees(r, *q, pool_) : relation_on_pool(r);
    const int rows = static_cast<int>(tape_.value(rel).rows());
    NodeId t = tape_.t_norm(tnorm_, tape_.broadcast_rows(b, rows), rel);
    return tape_.transpose(tape_.row_max(t));
  }

  NodeId eval(const Concept& c, bool positive, const Points* q) {
    const int n = q ? backend_.count(*q) : pool_size();
    if (auto* x = std::get_if<expr::Name>(&c.node)) return name_on(x->id, positive, q);
    if (std::holds_alternative<expr::Top>(c.node)) return constant_row(positive ? 1.0 : 0.0, n);
    if (std::holds_alternative<expr::Bottom>(c.node)) return constant_row(positive ? 0.0 : 1.0, n);
    if (auto* x = std::get_if<expr::Not>(&c.node)) return eval(*x->child, !positive, q);
    if (auto* x = std::get_if<expr::And>(&c.node)) {
      NodeId t = tape_.t_norm(tnorm_, eval(*x->left, true, q), eval(*x->right, true, q));
      return positive ? t : tape_.one_minus(t);
    }
    if (auto* x = std::get_if<expr::Or>(&c.node)) {
      NodeId t = tape_.t_norm(tnorm_, eval(*x->left, false, q), eval(*x->right, false, q));
      return positive ? tape_.one_minus(t) : t;
    }
    if (auto* x = std::get_if<expr::Exists>(&c.node)) {
      NodeId m = scan(x->relation, *x->child, true, q);
      return positive ? m : tape_.one_minus(m);
    }
    const auto& f = std::get<expr::Forall>(c.node);
    NodeId m = scan(f.relation, *f.child, false, q);
    return positive ? tape_.one_minus(m) : m;
  }

  Tape& tape_;
  Backend& backend_;
  TNorm tnorm_;
  Points pool_;
  std::unordered_map<std::string, NodeId> pos_memo_, neg_memo_, relation_memo_;
};

/// m(x, C) for an arbitrary point x, quantifiers scanning `pool`.
double membership(const ModelHandle& model, const Vector& x, const Concept& c,
                  const IndividualPool& pool);
/// m((x,y), R) = σ(MLP(x + f_e(R), y)).
double relation_membership(const ModelHandle& model, const Vector& x, const Vector& y,
                           const std::string& relation);
/// Degrees of every pool element (named first, then anonymous).
RowVector pool_membership(const ModelHandle& model, const IndividualPool& pool, const Concept& c);
/// Degrees of every element of a lookup interpretation.
RowVector pool_membership(const LookupInterpretation& interp, TNorm tnorm, const Concept& c);
/// P×P relation degrees over the pool.
Matrix pool_relation(const ModelHandle& model, const IndividualPool& pool,
                     const std::string& relation);

}  // namespace falcon
