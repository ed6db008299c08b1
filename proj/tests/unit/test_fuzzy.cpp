#include <random>

#include "doctest.h"
#include "falcon/fuzzy.hpp"

using namespace falcon;

namespace {
const TNorm kAll[] = {TNorm::Goedel, TNorm::Product, TNorm::Lukasiewicz};
}

TEST_CASE("t-norm examples") {
  CHECK(t_norm(TNorm::Product, 0.5, 0.5) == 0.25);
  CHECK(t_norm(TNorm::Lukasiewicz, 0.3, 0.4) == 0.0);
  for (auto t : kAll) {
    CHECK(t_norm(t, 0.37, 1.0) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(t_conorm(t, 0.37, 0.0) == doctest::Approx(0.37).epsilon(1e-15));
  }
  CHECK(t_conorm(TNorm::Product, 0.5, 0.5) == 0.75);
  CHECK(t_conorm(TNorm::Goedel, 0.2, 0.9) == 0.9);
}

TEST_CASE("negation") {
  CHECK(negation(0.0) == 1.0);
  CHECK(negation(0.25) == 0.75);
  CHECK(negation(negation(0.63)) == doctest::Approx(0.63).epsilon(1e-15));
}

TEST_CASE("domain checks clamp within tolerance and reject beyond") {
  CHECK(t_norm(TNorm::Product, 1.0 + 5e-10, 0.5) == 0.5);
  CHECK(t_norm(TNorm::Product, -5e-10, 0.5) == 0.0);
  CHECK_THROWS_AS(t_norm(TNorm::Product, 1.01, 0.5), std::domain_error);
  CHECK_THROWS_AS(negation(-0.2), std::domain_error);
}

TEST_CASE("laws on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto t : kAll) {
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng), z = u(rng), x2 = std::max(x, u(rng));
      REQUIRE(std::abs(t_norm(t, x, y) - t_norm(t, y, x)) <= 1e-12);
      REQUIRE(std::abs(t_norm(t, t_norm(t, x, y), z) - t_norm(t, x, t_norm(t, y, z))) <= 1e-9);
      REQUIRE(t_norm(t, x, y) <= t_norm(t, x2, y) + 1e-12);
      if (t == TNorm::Product) REQUIRE(std::abs(t_norm(t, x, 1.0) - x) <= 1e-15);
      else REQUIRE(t_norm(t, x, 1.0) == x);
      REQUIRE(t_conorm(t, x, y) == negation(t_norm(t, negation(x), negation(y))));
    }
  }
}

TEST_CASE("strictness holds for Goedel and Product, fails for Lukasiewicz") {
  CHECK(is_strict(TNorm::Goedel));
  CHECK(is_strict(TNorm::Product));
  CHECK_FALSE(is_strict(TNorm::Lukasiewicz));
  CHECK(t_norm(TNorm::Lukasiewicz, 0.3, 0.4) == 0.0);
  CHECK(t_norm(TNorm::Product, 0.3, 0.4) > 0.0);
  CHECK(t_norm(TNorm::Goedel, 0.3, 0.4) > 0.0);
}

TEST_CASE("parse_tnorm") {
  CHECK(parse_tnorm("Product") == TNorm::Product);
  CHECK(parse_tnorm("godel") == TNorm::Goedel);
  CHECK(parse_tnorm("lukasiewicz") == TNorm::Lukasiewicz);
  CHECK_THROWS(parse_tnorm("hamacher"));
}
