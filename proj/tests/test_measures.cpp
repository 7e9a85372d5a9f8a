#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "uccert/entropy.hpp"
#include "uccert/kernels.hpp"
#include "uccert/measures.hpp"

using namespace uccert;

TEST_CASE("measure construction validates shapes, ranges, and total mass") {
  CHECK_THROWS_AS(DiscreteMeasure({0.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({0.5, 1.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({0.5, 0.7}, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({0.5, 0.7}, {0.7, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({0.5, 0.7}, {1.001, -0.001}), std::invalid_argument);
  CHECK_NOTHROW(DiscreteMeasure({0.5, 0.7}, {1.0, -1e-16}));  // roundoff negativity
}

TEST_CASE("measure construction sorts atoms and drops nonpositive weights") {
  const DiscreteMeasure mu({0.9, 0.1, 0.5}, {0.2, 0.5, 0.3});
  REQUIRE(mu.size() == 3);
  CHECK(mu.atoms()[0] == 0.1);
  CHECK(mu.atoms()[1] == 0.5);
  CHECK(mu.atoms()[2] == 0.9);
  CHECK(mu.weights()[0] == 0.5);
  CHECK(mu.weights()[2] == 0.2);

  const DiscreteMeasure nu({0.3, 0.8}, {1.0, 0.0});
  CHECK(nu.size() == 1);
  CHECK(nu.atoms()[0] == 0.3);
}

TEST_CASE("atoms closer than the merge window coalesce") {
  const DiscreteMeasure mu({0.5, 0.5 + 1e-12, 0.9}, {0.3, 0.3, 0.4});
  REQUIRE(mu.size() == 2);
  CHECK(std::abs(mu.weights()[0] - 0.6) < 1e-15);
  CHECK(std::abs(mu.atoms()[0] - 0.5) < 1e-11);
}

TEST_CASE("point mass helper") {
  const DiscreteMeasure delta = DiscreteMeasure::delta(0.69);
  CHECK(delta.size() == 1);
  CHECK(mean(delta) == 0.69);
  CHECK(std::abs(expect_h(delta) - binary_entropy(0.69)) < 1e-15);
}

TEST_CASE("mean and entropy moment on a hand-checked measure") {
  const DiscreteMeasure mu({0.0, 0.5, 1.0}, {0.25, 0.5, 0.25});
  CHECK(std::abs(mean(mu) - 0.5) < 1e-15);
  CHECK(std::abs(expect_h(mu) - 0.5) < 1e-15);  // only the middle atom contributes
}

TEST_CASE("kernel quadratic form: hand value at a point mass") {
  const DiscreteMeasure mu = DiscreteMeasure::delta(0.5);
  const double value = quad_form_h(KernelSpec::iid(), mu, mu);
  CHECK(std::abs(value - binary_entropy(0.25)) < 1e-15);
  CHECK(std::abs(value - 0.8112781244591328) < 1e-15);
}

TEST_CASE("kernel quadratic form: symmetric and bilinear") {
  const DiscreteMeasure mu({0.2, 0.7}, {0.4, 0.6});
  const DiscreteMeasure nu({0.1, 0.5, 0.9}, {0.3, 0.3, 0.4});
  const DiscreteMeasure rho({0.35, 0.55}, {0.5, 0.5});
  for (const char* name : {"iid", "maxent", "ciid-aopt", "ciid-xxbar"}) {
    const KernelSpec spec = KernelSpec::from_kind(coupling_kind_from_string(name));
    INFO("kernel ", name);
    CHECK(std::abs(quad_form_h(spec, mu, nu) - quad_form_h(spec, nu, mu)) < 1e-15);

    // Blend mu and rho with weight q and compare against the linear combination.
    const double q = 0.3;
    const MixturePair pair(q, mu, rho);
    const DiscreteMeasure blended = pair.blended();
    const double lhs = quad_form_h(spec, blended, nu);
    const double rhs = (1 - q) * quad_form_h(spec, mu, nu) + q * quad_form_h(spec, rho, nu);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("mixture pair: blended law and q validation") {
  const DiscreteMeasure p0({0.2, 0.8}, {0.5, 0.5});
  const DiscreteMeasure p1 = DiscreteMeasure::delta(0.6);
  const MixturePair pair(0.25, p0, p1);
  const DiscreteMeasure blended = pair.blended();
  REQUIRE(blended.size() == 3);
  CHECK(std::abs(mean(blended) - (0.75 * 0.5 + 0.25 * 0.6)) < 1e-15);
  CHECK(std::abs(blended.weights()[0] - 0.375) < 1e-15);
  CHECK(std::abs(blended.weights()[1] - 0.25) < 1e-15);

  CHECK_THROWS_AS(MixturePair(-0.1, p0, p1), std::invalid_argument);
  CHECK_THROWS_AS(MixturePair(1.1, p0, p1), std::invalid_argument);
  CHECK_NOTHROW(MixturePair(0.0, p0, p1));
  CHECK_NOTHROW(MixturePair(1.0, p0, p1));
}

TEST_CASE("measure JSON carries atoms and weights in order") {
  const DiscreteMeasure mu({0.7, 0.2}, {0.6, 0.4});
  const nlohmann::ordered_json j = mu.to_json();
  REQUIRE(j.contains("atoms"));
  REQUIRE(j.contains("weights"));
  CHECK(j["atoms"][0] == 0.2);
  CHECK(j["atoms"][1] == 0.7);
  CHECK(j["weights"][0] == 0.4);
}
