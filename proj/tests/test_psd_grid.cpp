#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "uccert/entropy.hpp"
#include "uccert/kernels.hpp"
#include "uccert/psd_grid.hpp"

using namespace uccert;

TEST_CASE("grid separation parsing: exact decimal divisors of one") {
  CHECK(GridSpec::from_separation_string("0.5", {0}).inv_sep == 2);
  CHECK(GridSpec::from_separation_string("0.25", {0}).inv_sep == 4);
  CHECK(GridSpec::from_separation_string("0.004", {0}).inv_sep == 250);
  CHECK(GridSpec::from_separation_string("0.0004", {0}).inv_sep == 2500);
  CHECK_THROWS_AS(GridSpec::from_separation_string("0.0003", {0}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::from_separation_string("0.3", {0}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::from_separation_string("abc", {0}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::from_separation_string("0", {0}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::from_separation_string("-0.25", {0}), std::invalid_argument);
}

TEST_CASE("grid points include both endpoints at the exact spacing") {
  const GridSpec grid = GridSpec::from_inv_sep(4, {0});
  const std::vector<double> pts = grid.points();
  REQUIRE(pts.size() == 5);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 1.0);
  CHECK(pts[1] == 0.25);
  CHECK(grid.separation() == 0.25);
}

TEST_CASE("grid matrix entries are the negated entropies of kernel values") {
  const GridSpec grid = GridSpec::from_separation_string("0.5", {0});
  const Eigen::MatrixXd m = build_grid_matrix(KernelSpec::iid(), grid);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 3);
  CHECK(m(0, 0) == 0.0);                       // h(0) = 0
  CHECK(m(0, 2) == 0.0);                       // kernel value 0
  CHECK(std::abs(m(1, 1) + binary_entropy(0.25)) < 1e-15);
  CHECK(std::abs(m(1, 2) + 1.0) < 1e-15);      // -h(0.5)
  CHECK(m(2, 2) == 0.0);                       // h(1) = 0
  CHECK((m - m.transpose()).norm() == 0.0);
}

TEST_CASE("projection onto the moment-orthogonal subspace: identity stays PSD") {
  const GridSpec grid = GridSpec::from_inv_sep(4, {0});
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  const GridPsdResult r = project_and_min_eig(eye, grid);
  CHECK(r.subspace_dim == 4);
  CHECK(std::abs(r.min_eig - 1.0) < 1e-12);
  CHECK(r.certified);
}

TEST_CASE("projection detects an indefinite direction that survives the constraints") {
  // diag(-1, 1, ..., 1) restricted orthogonally to the constant vector
  // still sees the negative direction.
  const GridSpec grid = GridSpec::from_inv_sep(4, {0});
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
  m(0, 0) = -1.0;
  const GridPsdResult r = project_and_min_eig(m, grid);
  CHECK(r.min_eig < -0.5);
  CHECK_FALSE(r.certified);
}

TEST_CASE("repeated constraint degrees are rejected as rank-deficient") {
  const GridSpec grid = GridSpec::from_inv_sep(4, {0, 0});
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  CHECK_THROWS_AS(project_and_min_eig(eye, grid), std::runtime_error);
}

TEST_CASE("constraints spanning the whole grid leave the trivial subspace") {
  // 3 grid points and degrees {0,1,2} span all of R^3.
  const GridSpec grid = GridSpec::from_inv_sep(2, {0, 1, 2});
  const Eigen::MatrixXd m = build_grid_matrix(KernelSpec::iid(), grid);
  const GridPsdResult r = project_and_min_eig(m, grid);
  CHECK(r.subspace_dim == 0);
  CHECK(r.min_eig == std::numeric_limits<double>::infinity());
  CHECK(r.certified);
}

TEST_CASE("desk-scale product-kernel grid check is nonnegative") {
  const GridSpec grid = GridSpec::from_separation_string("0.004", {0, 1, 2});
  const Eigen::MatrixXd m = build_grid_matrix(KernelSpec::ciid_xxbar(), grid);
  const GridPsdResult r = project_and_min_eig(m, grid);
  CHECK(r.subspace_dim == 248);
  CHECK(r.min_eig >= -1e-10);
  // The subspace contains a direction where the form nearly vanishes, so the
  // minimum eigenvalue must also be tiny from above.
  CHECK(r.min_eig < 1e-6);
  CHECK(r.certified);
}

TEST_CASE("desk-scale independent-kernel grid check needs only two constraints") {
  const GridSpec grid = GridSpec::from_separation_string("0.004", {0, 1});
  const Eigen::MatrixXd m = build_grid_matrix(KernelSpec::iid(), grid);
  const GridPsdResult r = project_and_min_eig(m, grid);
  CHECK(r.subspace_dim == 249);
  CHECK(r.min_eig >= -1e-10);
  CHECK(r.certified);
}

TEST_CASE("grid report JSON carries the kernel, grid, and verdict") {
  const GridSpec grid = GridSpec::from_separation_string("0.05", {0, 1, 2});
  const nlohmann::ordered_json j = verify_grid_psd(KernelSpec::ciid_xxbar(), grid);
  CHECK(j["kernel"] == "ciid-xxbar");
  CHECK(j["grid"]["inv_sep"] == 20);
  CHECK(j["degrees"] == nlohmann::ordered_json::array({0, 1, 2}));
  CHECK(j["certified"] == true);
  CHECK(j.contains("min_eig"));
  CHECK(j.contains("runtime_s"));
}
