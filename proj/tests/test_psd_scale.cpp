#include <cmath>

#include <doctest.h>

#include "uccert/kernels.hpp"
#include "uccert/psd_grid.hpp"
#include "uccert/series.hpp"

using namespace uccert;

// Heavier verification runs: finer grids and deeper truncations than the
// unit suite uses, checking that the certificates are stable under scale.

TEST_CASE("grid positivity is stable under refinement") {
  const KernelSpec kernel = KernelSpec::ciid_xxbar();
  const std::vector<int> degrees = {0, 1, 2};

  const GridPsdResult coarse =
      project_and_min_eig(build_grid_matrix(kernel, GridSpec::from_inv_sep(250, degrees)),
                          GridSpec::from_inv_sep(250, degrees));
  const GridPsdResult fine =
      project_and_min_eig(build_grid_matrix(kernel, GridSpec::from_inv_sep(500, degrees)),
                          GridSpec::from_inv_sep(500, degrees));

  CHECK(coarse.certified);
  CHECK(fine.certified);
  CHECK(coarse.min_eig >= -1e-10);
  CHECK(fine.min_eig >= -1e-10);
  // Both are numerically-zero floors of a PSD-on-subspace operator; the
  // refinement must not surface a genuinely negative direction.
  CHECK(std::abs(fine.min_eig - coarse.min_eig) < 1e-10);
  CHECK(fine.subspace_dim == 498);
  CHECK(coarse.subspace_dim == 248);
}

TEST_CASE("exact rational factorization certifies a deep truncation") {
  const SeriesPsdReport report = verify_series_psd(29, 2, /*exact=*/true);
  CHECK(report.certified);
  CHECK(report.order == 29);
  CHECK(report.start == 2);
  CHECK(report.exact_path);
  CHECK(report.engine == "exact");
  CHECK(report.fail_index == -1);
}

TEST_CASE("floating-point eigenvalue floor stays at roundoff for a deep truncation") {
  const SeriesPsdReport report = verify_series_psd(60, 2, /*exact=*/false);
  CHECK(report.certified);
  CHECK(report.engine == "float");
  // The raw matrix entries grow combinatorially, so only the scaled
  // (Jacobi-equilibrated) eigenvalue floor is meaningful.
  CHECK(report.min_eig_scaled >= -1e-10);
}
