#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "uccert/constants.hpp"
#include "uccert/entropy.hpp"
#include "uccert/optimizer.hpp"

using namespace uccert;

namespace {

ThetaVector theta_of(std::array<double, 9> v) {
  ThetaVector theta;
  theta.v = v;
  return theta;
}

}  // namespace

TEST_CASE("objective: one-point mass reduces to an entropy ratio") {
  // All mass on a single atom x: value = h(x^2)/h(x) at beta = 0.
  const ThetaVector theta = theta_of({0.0, 1.0, 0.0, 0.5, 0.9, 0.5, 0.5, 0.9, 0.5});
  CHECK(std::abs(objective(theta, 0.0) - 1.4956888070428334) < 1e-12);
  CHECK(std::abs(objective(theta, 0.0) -
                 binary_entropy(0.81) / binary_entropy(0.9)) < 1e-15);
  CHECK(std::abs(mean_constraint(theta) - 0.9) < 1e-15);
}

TEST_CASE("objective: the conjectured optimizer scores exactly one for every beta") {
  const ConstantsTable& t = constants();
  const ThetaVector theta = conjectured_theta(t.c_prime, 0.0);
  for (double beta : {0.0, t.beta_star, 0.5, 1.0}) {
    INFO("beta ", beta);
    CHECK(std::abs(objective(theta, beta) - 1.0) <= 1e-10);
  }
  CHECK(std::abs(mean_constraint(theta) - (1.0 - t.c_prime)) < 1e-12);
}

TEST_CASE("objective: invariant under swapping the two mixture components") {
  const ThetaVector a = theta_of({0.2, 0.3, 0.3, 0.1, 0.4, 0.8, 0.2, 0.5, 0.7});
  const ThetaVector b = theta_of({0.2, 0.3, 0.7, 0.2, 0.5, 0.7, 0.1, 0.4, 0.8});
  for (double beta : {0.0, 0.4, 1.0}) {
    CHECK(std::abs(objective(a, beta) - objective(b, beta)) < 1e-14);
  }
  CHECK(std::abs(mean_constraint(a) - mean_constraint(b)) < 1e-15);
}

TEST_CASE("objective: invariant under relabeling atom slots") {
  // Both components share the same atoms, so the shared weights can be
  // permuted together with the atom slots.
  const ThetaVector a = theta_of({0.2, 0.3, 0.4, 0.1, 0.6, 0.9, 0.1, 0.6, 0.9});
  const ThetaVector b = theta_of({0.3, 0.5, 0.4, 0.6, 0.9, 0.1, 0.6, 0.9, 0.1});
  for (double beta : {0.0, 0.25, 1.0}) {
    CHECK(std::abs(objective(a, beta) - objective(b, beta)) < 1e-14);
  }
}

TEST_CASE("objective: domain errors for invalid packings and degenerate support") {
  CHECK_THROWS_AS(objective(theta_of({0.7, 0.7, 0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), 0.0),
                  std::domain_error);  // a1 + a2 > 1
  CHECK_THROWS_AS(objective(theta_of({0.2, 0.2, 0.0, 1.2, 0.5, 0.5, 0.5, 0.5, 0.5}), 0.0),
                  std::domain_error);  // atom out of the box
  // All atoms on {0,1}: the denominator E[h] vanishes.
  CHECK_THROWS_AS(objective(theta_of({0.3, 0.3, 0.5, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0}), 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(objective(theta_of({0.2, 0.2, 0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), -0.1),
                  std::domain_error);  // beta outside [0,1]
}

TEST_CASE("theta packing: accessors, validation, and JSON layout") {
  const ThetaVector theta = theta_of({0.1, 0.2, 0.4, 0.0, 0.3, 0.6, 0.1, 0.4, 0.7});
  CHECK(theta.a3() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(theta.valid());
  CHECK_FALSE(theta_of({0.6, 0.6, 0.4, 0, 0, 0, 0, 0, 0}).valid());
  const nlohmann::ordered_json j = theta.to_json();
  CHECK(j["a1"] == 0.1);
  CHECK(j["q"] == 0.4);
  CHECK(j["b0"] == 0.0);
  CHECK(j["b1"] == 0.1);

  const MixturePair pair = theta.to_mixture();
  CHECK(pair.q == 0.4);
  CHECK(pair.p0.size() == 3);
}

TEST_CASE("family objective: fixed point and domain") {
  const ConstantsTable& t = constants();
  for (double beta : {0.0, t.beta_star, 1.0}) {
    CHECK(std::abs(family_ratio(t.x_star, beta, t.c_prime) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(family_ratio(0.0, 0.0, 0.3827), std::domain_error);
  CHECK_THROWS_AS(family_ratio(1.0, 0.0, 0.3827), std::domain_error);
  // x too small forces p = (1-c)/x above one.
  CHECK_THROWS_AS(family_ratio(0.55, 0.0, 0.3827), std::domain_error);
}

TEST_CASE("conjectured optimizer: scalar family minimum matches the certified run") {
  const ConstantsTable& t = constants();
  const double beta = t.beta_star;
  const ThetaVector theta = conjectured_theta(0.3827, beta);
  // Scan the family: conjectured_theta must sit at the scalar minimum.
  const double x_theta = theta.v[4];
  double best = 1e300, best_x = 0;
  for (int i = 1; i < 4000; ++i) {
    const double x = (1.0 - 0.3827) + (1.0 - (1.0 - 0.3827)) * i / 4000.0;
    if (x >= 1.0) break;
    const double v = family_ratio(x, beta, 0.3827);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(std::abs(x_theta - best_x) < 1e-3);
  CHECK(std::abs(family_ratio(x_theta, beta, 0.3827) - best) < 1e-9);
  CHECK(objective(theta, beta) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("local polish: the conjectured optimizer is a fixed point") {
  const ConstantsTable& t = constants();
  CertificationConfig config;
  config.c = t.c_prime;
  config.beta = t.beta_star;
  const ThetaVector start = conjectured_theta(t.c_prime, t.beta_star);
  const LocalResult result = local_solve(start, config);
  CHECK(result.converged);
  CHECK(std::abs(result.ratio - 1.0) <= 1e-8);
  // Only the loaded coordinates are pinned: at the conjectured optimizer
  // q = 0 and a3 = 0, so the P1 atoms and the third P0 atom carry no weight
  // and form null directions the solver is free to wander along.
  for (int k = 0; k < 5; ++k) {
    INFO("coordinate ", k);
    CHECK(std::abs(result.theta.v[k] - start.v[k]) <= 1e-6);
  }
}

TEST_CASE("certification at the conjectured constant: minimum stays at one") {
  CertificationConfig config;
  config.c = 0.3827;
  config.beta = constants().beta_star;
  config.n_starts = 200;
  config.seed = 0;
  const CertificationReport report = certify(config);

  CHECK(report.certified);
  CHECK(report.min_ratio >= 1.0 - 1e-6);
  CHECK(std::abs(report.min_ratio - 1.0000147222609583) < 1e-9);
  CHECK(report.n_converged >= 150);
  CHECK(report.n_converged <= 200);
  CHECK(report.n_one_point >= 1);
  CHECK(static_cast<int>(report.starts.size()) == 200);

  // Argmin structure: effectively a single two-atom component {0, x*}
  // with the top weight at p*.
  CHECK(report.structure.is_degenerate_mixture);
  CHECK(report.structure.matches_conjecture);
  CHECK(report.structure.q_distance <= 1e-3);
  REQUIRE(report.structure.atom_distances.size() == 2);
  CHECK(report.structure.atom_distances[0] <= 1e-3);
  CHECK(report.structure.atom_distances[1] <= 1e-3);
  CHECK(report.structure.weight_error <= 1e-3);
}

TEST_CASE("certification just above the constant: the minimum drops below one") {
  CertificationConfig config;
  config.c = 0.3830;
  config.beta = constants().beta_star;
  config.n_starts = 120;
  config.seed = 0;
  const CertificationReport report = certify(config);
  CHECK_FALSE(report.certified);
  CHECK(report.min_ratio < 1.0);
  CHECK(std::abs(report.min_ratio - 0.999528727741644) < 1e-8);
}

TEST_CASE("certified minimum decreases as the constraint level rises") {
  const double levels[] = {0.3800, 0.3815, 0.3823, 0.3827, 0.3830};
  std::vector<double> minima;
  for (double c : levels) {
    CertificationConfig config;
    config.c = c;
    config.beta = constants().beta_star;
    config.n_starts = 60;
    config.seed = 11;
    minima.push_back(certify(config).min_ratio);
  }
  for (std::size_t i = 1; i < minima.size(); ++i) {
    INFO("level index ", i);
    CHECK(minima[i] <= minima[i - 1] + 1e-9);
  }
  CHECK(minima.front() > 1.0);
  CHECK(minima.back() < 1.0);
}

TEST_CASE("certification is deterministic across runs and thread counts") {
  CertificationConfig config;
  config.c = 0.3827;
  config.beta = 0.1;
  config.n_starts = 40;
  config.seed = 5;
  config.threads = 1;
  const std::string one = certify(config).to_json().dump();
  config.threads = 4;
  const std::string four = certify(config).to_json().dump();
  CHECK(one == four);
  config.threads = 0;
  CHECK(certify(config).to_json().dump() == one);
}

TEST_CASE("per-start records are honest about non-convergence") {
  CertificationConfig config;
  config.c = 0.3827;
  config.beta = constants().beta_star;
  config.n_starts = 200;
  config.seed = 0;
  const CertificationReport report = certify(config);
  int converged = 0;
  for (const StartRecord& record : report.starts) {
    if (record.converged) ++converged;
    CHECK(record.ratio > 0.9);  // every recorded endpoint is a real objective value
  }
  CHECK(converged == report.n_converged);
  CHECK(converged < 200);  // some hard starts legitimately stall and are flagged
}

TEST_CASE("invalid configurations are rejected up front") {
  CertificationConfig config;
  config.c = 0.6;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.c = 0.3827;
  config.beta = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.beta = 0.0;
  config.n_starts = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("trace CSV: one line per start plus a header") {
  CertificationConfig config;
  config.c = 0.3827;
  config.beta = 0.0;
  config.n_starts = 12;
  config.seed = 2;
  const CertificationReport report = certify(config);
  const std::string path = "trace_test_tmp.csv";
  write_trace_csv(report, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "start_index,converged,ratio");
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines == 12);
  in.close();
  std::remove(path.c_str());
}
