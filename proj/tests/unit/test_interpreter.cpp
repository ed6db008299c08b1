#include <random>

#include "doctest.h"
#include "falcon/crisp.hpp"
#include "falcon/interpreter.hpp"
#include "oracles/oracles.hpp"

using namespace falcon;

namespace {

TrainConfig small_config(int dim = 4) {
  TrainConfig cfg;
  cfg.dim = dim;
  return cfg;
}

Signature signature_of(const oracle::Vocabulary& v) {
  Signature s;
  for (const auto& c : v.concepts) s.add_concept(c);
  for (const auto& r : v.relations) s.add_relation(r);
  for (const auto& i : v.individuals) s.add_individual(i);
  return s;
}

/// A model whose concept and relation scores swing across (0, 1).
ModelHandle lively_model(const Signature& sig, std::uint64_t seed) {
  TrainConfig cfg = small_config();
  cfg.emb_init = 1.0;
  cfg.mlp_input_gain = 4.0;
  return init_model(sig, cfg, seed);
}

Matrix uniform(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

}  // namespace

TEST_CASE("constants and involution") {
  std::mt19937_64 rng(2);
  const auto v = oracle::random_vocabulary(rng, 3, 2, 3);
  const ModelHandle model = lively_model(signature_of(v), 1);
  const IndividualPool pool = eval_pool(model, 9, 8);
  const Vector x = uniform(rng, 4, 1).col(0);
  CHECK(membership(model, x, *top(), pool) == 1.0);
  CHECK(membership(model, x, *bottom(), pool) == 0.0);
  for (int i = 0; i < 50; ++i) {
    const ConceptPtr c = oracle::random_concept(rng, v, 3);
    CHECK(pool_membership(model, pool, *negate(negate(c))) == pool_membership(model, pool, *c));
    CHECK(membership(model, x, *negate(negate(c)), pool) == membership(model, x, *c, pool));
  }
}

TEST_CASE("memberships stay in [0,1]") {
  std::mt19937_64 rng(4);
  int evaluated = 0;
  for (std::uint64_t m = 0; evaluated < 10000; ++m) {
    const auto v = oracle::random_vocabulary(rng, 4, 2, 4);
    const ModelHandle model = lively_model(signature_of(v), m);
    const IndividualPool pool = eval_pool(model, m, 6);
    for (int i = 0; i < 20; ++i) {
      const RowVector d = pool_membership(model, pool, *oracle::random_concept(rng, v, 3));
      REQUIRE(d.minCoeff() >= 0.0);
      REQUIRE(d.maxCoeff() <= 1.0);
      evaluated += static_cast<int>(d.size());
    }
  }
}

TEST_CASE("De Morgan and quantifier duality are exact") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = oracle::random_vocabulary(rng, 4, 2, 4);
    TrainConfig cfg = small_config();
    cfg.emb_init = 1.0;
    cfg.mlp_input_gain = 4.0;
    cfg.tnorm = std::array{TNorm::Goedel, TNorm::Product, TNorm::Lukasiewicz}[trial % 3];
    const ModelHandle model = init_model(signature_of(v), cfg, static_cast<std::uint64_t>(trial));
    const IndividualPool pool = eval_pool(model, 3, 6);
    const ConceptPtr a = oracle::random_concept(rng, v, 2), b = oracle::random_concept(rng, v, 2);
    const std::string& r = v.relations.front();
    CHECK(pool_membership(model, pool, *negate(conj(a, b))) ==
          pool_membership(model, pool, *disj(negate(a), negate(b))));
    CHECK(pool_membership(model, pool, *negate(disj(a, b))) ==
          pool_membership(model, pool, *conj(negate(a), negate(b))));
    CHECK(pool_membership(model, pool, *only(r, a)) ==
          pool_membership(model, pool, *negate(some(r, negate(a)))));
    CHECK(pool_membership(model, pool, *some(r, a)) ==
          pool_membership(model, pool, *negate(only(r, negate(a)))));
  }
}

TEST_CASE("growing the pool raises exists and lowers forall") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = oracle::random_vocabulary(rng, 3, 2, 4);
    const ModelHandle model = lively_model(signature_of(v), static_cast<std::uint64_t>(trial));
    IndividualPool small = eval_pool(model, 1, 3);
    IndividualPool big = small;
    big.anonymous.conservativeResize(Eigen::NoChange, small.anonymous.cols() + 5);
    big.anonymous.rightCols(5) = uniform(rng, model.dim(), 5);
    const ConceptPtr body = conj(name(v.concepts.front()), negate(name(v.concepts.back())));
    const std::string& r = v.relations.back();
    const auto named = static_cast<Eigen::Index>(v.individuals.size());
    const RowVector e0 = pool_membership(model, small, *some(r, body)).head(named);
    const RowVector e1 = pool_membership(model, big, *some(r, body)).head(named);
    const RowVector f0 = pool_membership(model, small, *only(r, body)).head(named);
    const RowVector f1 = pool_membership(model, big, *only(r, body)).head(named);
    // GEMM rounding differs with the pool width, hence the slack.
    CHECK((e1.array() >= e0.array() - 1e-12).all());
    CHECK((f1.array() <= f0.array() + 1e-12).all());
  }
}

TEST_CASE("lookup models agree exactly with the brute-force evaluator") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = oracle::random_vocabulary(rng, 4, 2, 3);
    const int size = std::uniform_int_distribution<int>(1, 6)(rng);
    const LookupInterpretation I = oracle::random_dyadic_lookup(rng, v, size);
    const TNorm t = std::array{TNorm::Goedel, TNorm::Product, TNorm::Lukasiewicz}[trial % 3];
    const ConceptPtr c = oracle::random_concept(rng, v, 4);
    const RowVector got = pool_membership(I, t, *c);
    REQUIRE(got.size() == size);
    for (int x = 0; x < size; ++x) REQUIRE_MESSAGE(got(x) == oracle::fuzzy(I, t, *c, x), render(c));
  }
}

TEST_CASE("three-element fixture, exists under Goedel") {
  LookupInterpretation I;
  I.universe_size = 3;
  I.concepts["B"] = RowVector{{0.25, 1.0, 0.5}};
  I.relations["r"] = Matrix{{0.0, 0.75, 0.5}, {1.0, 0.0, 0.0}, {0.5, 0.5, 0.125}};
  const RowVector got = pool_membership(I, TNorm::Goedel, *some("r", name("B")));
  const double want[] = {0.75, 0.25, 0.5};
  for (int x = 0; x < 3; ++x) {
    double best = 0;
    for (int y = 0; y < 3; ++y) best = std::max(best, std::min(I.concepts["B"](y), I.relations["r"](x, y)));
    CHECK(got(x) == best);
    CHECK(got(x) == want[x]);
  }
}

TEST_CASE("crisp tables reproduce crisp extensions") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = oracle::random_vocabulary(rng);
    const CrispInterpretation I = oracle::random_crisp(rng, v, 5);
    const LookupInterpretation L = to_lookup(I, signature_of(v));
    const ConceptPtr c = oracle::random_concept(rng, v, 3);
    const auto ext = oracle::extension(I, *c);
    const RowVector got = pool_membership(L, TNorm::Product, *c);
    for (int x = 0; x < 5; ++x) REQUIRE(got(x) == (ext.contains(x) ? 1.0 : 0.0));
  }
}

TEST_CASE("relation membership") {
  std::mt19937_64 rng(14);
  Signature sig;
  sig.add_concept("A");
  sig.add_relation("r");
  sig.add_individual("a");
  ModelHandle model = lively_model(sig, 3);
  for (int i = 0; i < 100; ++i) {
    const Matrix xy = uniform(rng, 4, 2);
    const double d = relation_membership(model, xy.col(0), xy.col(1), "r");
    REQUIRE(d > 0.0);
    REQUIRE(d < 1.0);
  }
  CHECK_THROWS_AS(relation_membership(model, Vector::Zero(4), Vector::Zero(4), "s"), SymbolError);
  for (auto s : model.layout.relation_mlp.weights) model.params.at(s).setZero();
  const Matrix xy = uniform(rng, 4, 2);
  CHECK(relation_membership(model, xy.col(0), xy.col(1), "r") == 0.5);
}

TEST_CASE("relation gradient with respect to the relation embedding") {
  Signature sig;
  sig.add_concept("A");
  sig.add_relation("r");
  sig.add_relation("s");
  sig.add_individual("a");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelHandle model = lively_model(sig, seed);
    std::mt19937_64 rng(seed);
    const Matrix xs = uniform(rng, 4, 3), ys = uniform(rng, 4, 2), w = uniform(rng, 3, 2);
    auto loss_with = [&](const ParamStore& p, Gradients* grads) {
      ModelHandle m = model;
      m.params = p;
      Tape t;
      NeuralBackend b(t, m);
      const NodeId d = b.relation_degrees("r", b.constant_points(xs), b.constant_points(ys));
      const NodeId out = t.sum(t.mul(d, t.constant(w)));
      if (grads) {
        t.backward(out);
        *grads = t.gradients(m.params);
      }
      return t.scalar_value(out);
    };
    Gradients g;
    loss_with(model.params, &g);
    const auto fd = oracle::central_differences([&](const ParamStore& p) { return loss_with(p, nullptr); },
                                                model.params);
    const std::size_t slot = model.layout.relation_emb;
    for (Eigen::Index k = 0; k < g[slot].size(); ++k) {
      const double a = g[slot].data()[k], b = fd[slot].data()[k];
      CHECK(std::abs(a - b) <= 1e-4 * std::max(std::abs(a), std::abs(b)) + 1e-9);
    }
    // Column of the unused relation gets nothing.
    CHECK(g[slot].col(1).isZero());
  }
}

TEST_CASE("sampling pools") {
  const Ontology family = builtin_family();
  const ModelHandle model = init_model(family.signature, family_config(), 0);
  std::mt19937_64 rng(0);
  const auto named_only = sample_pool(model, rng, 0, 0);
  CHECK(named_only.size() == 10);
  CHECK(named_only.named == model.named_embeddings());
  CHECK(sample_pool(model, rng, 2, 2).size() == 14);

  const auto exact = sample_pool(model, rng, 5, 1, 0.0);
  REQUIRE(exact.gauss_base.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(exact.anonymous.col(static_cast<Eigen::Index>(i)) == model.named_embeddings().col(exact.gauss_base[i]));
  CHECK(exact.anonymous.col(5).cwiseAbs().maxCoeff() <= 1.0);

  Signature no_named;
  no_named.add_concept("A");
  const ModelHandle bare = init_model(no_named, small_config(), 0);
  const auto fallback = sample_pool(bare, rng, 2, 2);
  CHECK(fallback.size() == 4);
  CHECK(fallback.gauss_base.empty());
  CHECK(fallback.anonymous.cwiseAbs().maxCoeff() <= 1.0);

  const auto p1 = eval_pool(model, 7, 64), p2 = eval_pool(model, 7, 64);
  CHECK(p1.size() == 74);
  CHECK(p1.all() == p2.all());
  CHECK_FALSE(eval_pool(model, 8, 64).all() == p1.all());
}

TEST_CASE("initialization") {
  const Ontology family = builtin_family();
  TrainConfig cfg = small_config(9);
  const ModelHandle m = init_model(family.signature, cfg, 5);
  CHECK(m.params[m.layout.concept_emb].cols() == 10);
  CHECK(m.params[m.layout.relation_emb].cols() == 2);
  CHECK(m.params[m.layout.individual_emb].cols() == 10);
  CHECK(m.params[m.layout.concept_emb].cwiseAbs().maxCoeff() <= 1.0 / 3.0);
  CHECK(m.layout.concept_spec.input_dim == 18);
  CHECK(m.layout.concept_spec.hidden_dims == std::vector<int>{18});
  for (auto s : m.layout.concept_mlp.biases) CHECK(m.params[s].isZero());
  CHECK(init_model(family.signature, cfg, 5).params == m.params);
  CHECK_FALSE(init_model(family.signature, cfg, 6).params == m.params);
}
