#include <cmath>
#include <random>

#include "doctest.h"
#include "falcon/crisp.hpp"
#include "falcon/training.hpp"
#include "oracles/oracles.hpp"

using namespace falcon;

namespace {

/// Loss of one component over a lookup interpretation.
template <class F>
double lookup_loss(const LookupInterpretation& I, F&& build) {
  Tape t;
  LookupBackend be(t, I);
  Evaluator ev(t, be, TNorm::Product, be.universe());
  return t.scalar_value(build(ev));
}

}  // namespace

TEST_CASE("tbox loss by hand") {
  LookupInterpretation I;
  I.universe_size = 3;
  I.concepts["X"] = RowVector{{0.2, 0.4, 0.0}};
  I.concepts["Y"] = RowVector{{0.1, 0.1, 0.1}};
  const std::vector<UnsatTarget> two{{name("X"), 0}, {name("Y"), 1}};
  CHECK(lookup_loss(I, [&](auto& ev) { return tbox_loss(ev, std::span(two)); }) ==
        doctest::Approx(0.15).epsilon(1e-15));
  const std::vector<UnsatTarget> ones{{top(), 0}};
  CHECK(lookup_loss(I, [&](auto& ev) { return tbox_loss(ev, std::span(ones)); }) == 1.0);
  CHECK(lookup_loss(I, [&](auto& ev) { return tbox_loss(ev, std::span<const UnsatTarget>{}); }) == 0.0);
}

TEST_CASE("assertion losses by hand") {
  LookupInterpretation I;
  I.universe_size = 2;
  I.concepts["A"] = RowVector{{1.0, 0.5}};
  I.concepts["Z"] = RowVector{{0.0, 0.0}};
  I.relations["r"] = Matrix{{0.0, 0.8}, {0.6, 0.0}};
  I.relations["z"] = Matrix::Zero(2, 2);
  I.relations["o"] = Matrix::Ones(2, 2);
  I.individuals = {{"a", 0}, {"b", 1}};
  auto concept_loss = [&](const std::string& c) {
    const std::vector<ConceptAssertion> as{{name(c), "a"}, {name(c), "b"}};
    return lookup_loss(I, [&](auto& ev) { return abox_concept_loss(ev, std::span(as)); });
  };
  auto role_loss = [&](const std::string& r) {
    const std::vector<RoleAssertion> as{{r, "a", "b"}, {r, "b", "a"}};
    return lookup_loss(I, [&](auto& ev) { return abox_role_loss(ev, std::span(as)); });
  };
  CHECK(concept_loss("A") == 0.25);
  CHECK(concept_loss("Z") == 1.0);
  const std::vector<ConceptAssertion> tops{{top(), "a"}};
  CHECK(lookup_loss(I, [&](auto& ev) { return abox_concept_loss(ev, std::span(tops)); }) == 0.0);
  CHECK(role_loss("r") == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(role_loss("z") == 1.0);
  CHECK(role_loss("o") == 0.0);
}

TEST_CASE("loss weights") {
  CHECK(combine_losses(0.3, 0.6, 0.0, 1.0 / 3, 1.0 / 3) == doctest::Approx(0.3).epsilon(1e-15));
  const auto all = mix_weights(0.5, 0.2, true, true, true);
  CHECK(all.tbox == 0.5);
  CHECK(all.concept_assertions == 0.2);
  CHECK(all.role_assertions == doctest::Approx(0.3).epsilon(1e-15));
  const auto no_roles = mix_weights(0.5, 0.2, true, true, false);
  CHECK(no_roles.tbox == doctest::Approx(5.0 / 7).epsilon(1e-15));
  CHECK(no_roles.concept_assertions == doctest::Approx(2.0 / 7).epsilon(1e-15));
  CHECK(no_roles.role_assertions == 0.0);
  const auto tbox_only = mix_weights(1.0 / 3, 1.0 / 3, true, false, false);
  CHECK(tbox_only.tbox == 1.0);
  CHECK(combine_losses(0.2, std::nullopt, std::nullopt, 0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(validate_weights(0.5, 0.5), ConfigError);
  CHECK_THROWS_AS(validate_weights(-0.1, 0.2), ConfigError);
  CHECK_THROWS_AS(validate_weights(0.2, 1.1), ConfigError);
}

TEST_CASE("BPR terms") {
  Tape t;
  CHECK(t.scalar_value(t.neg_log_sigmoid(t.scalar(0.0))) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.scalar_value(t.neg_log_sigmoid(t.scalar(0.0))) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(t.scalar_value(t.neg_log_sigmoid(t.scalar(2.0))) == doctest::Approx(0.1269).epsilon(1e-3));
  CHECK(t.scalar_value(t.neg_log_sigmoid(t.scalar(2.0))) ==
        doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-14));
  CHECK(t.scalar_value(t.neg_log_sigmoid(t.scalar(800.0))) == 0.0);
  CHECK(std::isfinite(t.scalar_value(t.neg_log_sigmoid(t.scalar(-800.0)))));

  // With a silent relation network every score ties, so each pair costs ln 2.
  const Ontology o = parse_ontology("r(a, b)\nr(b, c)\nr(c, a)");
  TrainConfig cfg;
  cfg.dim = 4;
  ModelHandle m = init_model(o.signature, cfg, 1);
  for (auto s : m.layout.relation_mlp.weights) m.params.at(s).setZero();
  Tape u;
  NeuralBackend be(u, m);
  std::mt19937_64 rng(0);
  const NodeId l = bpr_abox_loss(be, o.signature, std::span(o.abox_role()), rng, 4);
  CHECK(u.scalar_value(l) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("crisp models of random satisfiable ontologies have zero loss") {
  std::mt19937_64 rng(21);
  int models = 0;
  for (int trial = 0; models < 20; ++trial) {
    REQUIRE(trial < 1000);
    const auto v = oracle::random_vocabulary(rng, 4, 2, 4);
    const int size = std::uniform_int_distribution<int>(1, 6)(rng);
    const CrispInterpretation I = oracle::random_crisp(rng, v, size);
    const Ontology o = oracle::satisfied_part(oracle::random_ontology(rng, v, 10, 2), I);
    if (o.tbox().empty() && o.abox_concept().empty() && o.abox_role().empty()) continue;
    REQUIRE(oracle::violations(I, o).empty());
    const LookupInterpretation L = to_lookup(I, o.signature);
    for (TNorm t : {TNorm::Goedel, TNorm::Product, TNorm::Lukasiewicz})
      CHECK(std::abs(evaluate_total_loss(L, t, o)) <= 1e-12);
    ++models;
  }
}

TEST_CASE("a violated axiom in a crisp model gives positive loss") {
  std::mt19937_64 rng(22);
  int checked = 0;
  for (int trial = 0; checked < 50; ++trial) {
    REQUIRE(trial < 2000);
    const auto v = oracle::random_vocabulary(rng, 4, 2, 4);
    const CrispInterpretation I = oracle::random_crisp(rng, v, 4);
    const Ontology o = oracle::random_ontology(rng, v, 4, 2);
    if (oracle::violations(I, o).empty()) continue;
    const double loss = evaluate_total_loss(to_lookup(I, o.signature), TNorm::Product, o);
    CHECK(loss > 0.0);
    ++checked;
  }
}

TEST_CASE("total loss gradient matches finite differences") {
  const Ontology o = parse_ontology(
      "A SubClassOf B\n(B and some r.A) SubClassOf Nothing\na : A\nb : (not B)\nr(a, b)");
  TrainConfig cfg;
  cfg.dim = 3;
  cfg.emb_init = 1.0;
  cfg.mlp_input_gain = 3.0;
  const auto targets = normalize_tbox(o);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 10; ++seed) {
    REQUIRE(seed < 100);
    const ModelHandle model = init_model(o.signature, cfg, seed);
    std::mt19937_64 rng(seed);
    const IndividualPool pool = sample_pool(model, rng, 2, 2);
    auto run = [&](const ModelHandle& m, Tape& t) {
      NeuralBackend be(t, m);
      Evaluator ev(t, be, cfg.tnorm, be.pool_points(pool));
      return total_loss(ev, std::span(targets), std::span(o.abox_concept()), std::span(o.abox_role()), 0.4, 0.3);
    };
    Tape t;
    const NodeId out = run(model, t);
    if (oracle::min_tie_gap(t) < 1e-6) continue;
    t.backward(out);
    const Gradients g = t.gradients(model.params);
    const auto fd = oracle::central_differences(
        [&](const ParamStore& p) {
          ModelHandle m = model;
          m.params = p;
          Tape u;
          return u.scalar_value(run(m, u));
        },
        model.params);
    for (std::size_t s = 0; s < g.size(); ++s)
      for (Eigen::Index k = 0; k < g[s].size(); ++k) {
        const double a = g[s].data()[k], b = fd[s].data()[k];
        REQUIRE_MESSAGE(std::abs(a - b) <= 1e-4 * std::max(std::abs(a), std::abs(b)) + 1e-9,
                        model.params.name(s) << "[" << k << "] seed " << seed << " " << a << " " << b);
      }
    ++checked;
  }
}

TEST_CASE("training runs") {
  const Ontology toy = parse_ontology("A SubClassOf B\n(B and C) SubClassOf Nothing\na : A\nc : C");
  TrainConfig cfg = family_config();
  cfg.steps = 600;
  const auto r = train_model(toy, cfg, 3);
  REQUIRE(r.loss_trace.size() == 600);
  CHECK(r.loss_trace.back() < 1e-3);
  CHECK(r.final_loss < 1e-3);

  cfg.steps = 0;
  const auto none = train_model(toy, cfg, 3);
  CHECK(none.loss_trace.empty());
  CHECK(none.model.params == init_model(toy.signature, cfg, 3).params);

  cfg.steps = 40;
  const auto x = train_model(toy, cfg, 5), y = train_model(toy, cfg, 5);
  CHECK(x.model.params == y.model.params);
  CHECK(x.loss_trace == y.loss_trace);

  cfg.seed = 5;
  const auto one = train_ensemble(toy, cfg, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.models[0].params == x.model.params);
  CHECK(one.final_losses[0] == x.final_loss);

  const auto serial = train_ensemble(toy, cfg, 3, 1), parallel = train_ensemble(toy, cfg, 3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial.models[i].seed == 5 + i);
    CHECK(serial.models[i].params == parallel.models[i].params);
  }
  CHECK_THROWS_AS(train_ensemble(toy, cfg, 0), ConfigError);
}

TEST_CASE("Family training cuts the loss tenfold") {
  const auto r = train_model(builtin_family(), family_config(), 0);
  CHECK(r.final_loss < r.loss_trace.front() / 10);
  CHECK(r.final_loss < 0.05);
}

TEST_CASE("a diverging run reports the step") {
  const Ontology toy = parse_ontology("A SubClassOf B\na : A");
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.lr = 1e300;
  cfg.steps = 50;
  try {
    train_model(toy, cfg, 0);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
  cfg.seed = 0;
  CHECK_THROWS_AS(train_ensemble(toy, cfg, 2), TrainingError);
}
