#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "uccert/constants.hpp"
#include "uccert/entropy.hpp"

using namespace uccert;

TEST_CASE("solved constants: full-precision pinned values") {
  const ConstantsTable& t = constants();
  CHECK(std::abs(t.u_star - 0.3819660112501051) < 1e-12);
  CHECK(std::abs(t.b_star - 0.329454738503037) < 1e-12);
  CHECK(std::abs(t.a_star - 0.0788772927059232) < 1e-12);
  CHECK(std::abs(t.c_star - 0.38234553336670274) < 1e-12);
  CHECK(std::abs(t.alpha_star - 0.035606980437448074) < 1e-12);
  CHECK(std::abs(t.x_star - 0.690787593924988) < 1e-12);
  CHECK(std::abs(t.p_star - 0.8936045139054652) < 1e-12);
  CHECK(std::abs(t.c_prime - 0.3827090879187349) < 1e-12);
  CHECK(std::abs(t.beta_star - 0.1000525598628938) < 1e-12);
}

TEST_CASE("solved constants: published rounded values at their looser scales") {
  const ConstantsTable& t = constants();
  CHECK(std::abs(t.c_star - 0.3823455) < 5e-7);
  CHECK(std::abs(t.alpha_star - 0.0356069) < 1e-6);
  CHECK(std::abs(t.p_star - 0.893604513905457) < 1e-9);
  CHECK(std::abs(t.c_prime - 0.382709087918741) < 1e-9);
  CHECK(std::abs(t.beta_star - 0.100052559862974) < 1e-9);
}

TEST_CASE("solved constants: defining-equation residuals vanish") {
  const ConstantsTable& t = constants();
  CHECK(t.entries.size() == 10);
  for (const auto& [name, entry] : t.entries) {
    INFO("constant ", name);
    CHECK(std::abs(entry.residual) <= 1e-12);
    CHECK_FALSE(entry.equation.empty());
  }
}

TEST_CASE("solved constants: residuals recomputed from first principles") {
  const ConstantsTable& t = constants();
  CHECK(std::abs((1 - t.u_star) * (1 - t.u_star) - t.u_star) < 1e-12);
  const double hb = binary_entropy(t.b_star);
  CHECK(std::abs(hb * (2 - hb) - binary_entropy((1 - t.b_star) * (1 - t.b_star))) < 1e-12);
  CHECK(std::abs((1 - 2 * t.a_star) * 1.0 - (1 - t.a_star) * hb) < 1e-12);
  CHECK(std::abs(t.c_star - ((1 - t.a_star) * t.b_star + t.a_star)) < 1e-15);
  const double x = t.x_star;
  CHECK(std::abs(x * x * (2 + (1 - x) * (1 - x)) - 1) < 1e-12);
  CHECK(std::abs(t.p_star * binary_entropy(x * x) - binary_entropy(x)) < 1e-12);
  CHECK(std::abs(t.c_prime - (1 - t.p_star * t.x_star)) < 1e-15);
}

TEST_CASE("constants are ordered along the certification chain") {
  const ConstantsTable& t = constants();
  CHECK(t.u_star < t.c_star);
  CHECK(t.c_star < t.c_prime);
  CHECK(t.c_prime < 0.5);
  CHECK(t.beta_star > 0.0);
  CHECK(t.beta_star < 1.0);
}

TEST_CASE("the two-point equation has exactly two roots; the larger is selected") {
  const double small = solve_bstar_small_root();
  const double big = solve_bstar();
  CHECK(std::abs(small - 0.13949945190986185) < 1e-12);
  CHECK(std::abs(big - 0.32945473850303708) < 1e-12);
  CHECK(small < big);
  auto equation = [](double b) {
    const double hb = binary_entropy(b);
    return hb * (2 - hb) - binary_entropy((1 - b) * (1 - b));
  };
  CHECK(std::abs(equation(small)) < 1e-12);
  CHECK(std::abs(equation(big)) < 1e-12);
  // Sign structure + - + across the two roots.
  CHECK(equation(0.01) > 0.0);
  CHECK(equation(0.25) < 0.0);
  CHECK(equation(0.45) > 0.0);
}

TEST_CASE("alternate mixture-weight reading lies outside [0,1] and is recorded") {
  const ConstantsTable& t = constants();
  CHECK(std::abs(t.beta_star_alt - (-0.0041804451077218554)) < 1e-9);
  CHECK((t.beta_star_alt < 0.0 || t.beta_star_alt > 1.0));
  CHECK(t.entries.count("beta_star_alt") == 1);
}

TEST_CASE("entropy ratio helper exceeds one away from its fixed point") {
  CHECK(std::abs(compute_pstar(0.5) - 1.2326229068073113) < 1e-12);
  CHECK(compute_pstar(0.5) > 1.0);
  CHECK(std::abs(compute_pstar(constants().x_star) - constants().p_star) < 1e-12);
}

TEST_CASE("constant helpers validate their inputs") {
  CHECK_THROWS_AS(compute_astar(0.0), std::domain_error);
  CHECK_THROWS_AS(compute_astar(1.0), std::domain_error);
  CHECK_THROWS_AS(compute_cstar(-0.1, 0.3), std::domain_error);
  CHECK_THROWS_AS(compute_pstar(1.0), std::domain_error);
}

TEST_CASE("cached table equals a fresh solve") {
  const ConstantsTable fresh = solve_constants();
  const ConstantsTable& cached = constants();
  CHECK(fresh.u_star == cached.u_star);
  CHECK(fresh.b_star == cached.b_star);
  CHECK(fresh.beta_star == cached.beta_star);
  CHECK(fresh.to_json() == cached.to_json());
}

TEST_CASE("constants table serializes every entry with value and residual") {
  const nlohmann::ordered_json j = constants().to_json();
  for (const char* name : {"u_star", "b_star", "a_star", "c_star", "alpha_star",
                           "x_star", "p_star", "c_prime", "beta_star", "beta_star_alt"}) {
    INFO("entry ", name);
    REQUIRE(j.contains(name));
    CHECK(j[name].contains("value"));
    CHECK(j[name].contains("residual"));
    CHECK(j[name].contains("defining_equation_text"));
  }
}
