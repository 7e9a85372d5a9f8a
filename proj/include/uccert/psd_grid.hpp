#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "uccert/kernels.hpp"

// Grid discretization of the quadratic-form positivity check: the matrix
// M[i][j] = -h(kernel(x_i, x_j)) restricted to the subspace orthogonal to
// prescribed moment constraints must be positive semidefinite for the
// kernel's entropy functional to certify. The grid includes both endpoints
// {0, sep, 2 sep, ..., 1}.

namespace uccert {

struct GridSpec {
  int inv_sep = 0;                     // 1/separation (integer by contract)
  std::vector<int> constraint_degrees; // monomial degrees removed, e.g. {0,1,2}

  /// Parses a decimal separation string ("0.0004"); throws
  /// std::invalid_argument unless it divides 1 exactly in decimal
  /// (e.g. "0.0003" does not: 3 does not divide 10^4).
  static GridSpec from_separation_string(const std::string& separation,
                                         std::vector<int> degrees);
  static GridSpec from_inv_sep(int inv_sep, std::vector<int> degrees);

  double separation() const { return 1.0 / inv_sep; }
  std::vector<double> points() const;  // i / inv_sep for i = 0..inv_sep

  nlohmann::ordered_json to_json() const;
};

/// Assembles M[i][j] = -h(kernel_value_x(spec, x_i, x_j)) on the grid.
Eigen::MatrixXd build_grid_matrix(const KernelSpec& spec, const GridSpec& grid);

struct GridPsdResult {
  double min_eig = 0.0;  // +inf when the constrained subspace is trivial
  int subspace_dim = 0;
  bool certified = false;  // min_eig >= -1e-10
};

/// Projects M onto the orthogonal complement of the span of the moment
/// columns V[:,k] = x_i^degree_k (null-space basis B from a full QR of V)
/// and returns the minimum eigenvalue of B^T M B. Throws
/// std::runtime_error naming the offending degree when the moment columns
/// are numerically rank-deficient (e.g. a repeated degree).
GridPsdResult project_and_min_eig(const Eigen::MatrixXd& m,
                                  const GridSpec& grid);

/// Convenience wrapper producing the full JSON report
/// {kernel, grid, degrees, min_eig, certified, runtime_s}.
nlohmann::ordered_json verify_grid_psd(const KernelSpec& spec,
                                       const GridSpec& grid);

/// Row-major CSV export at 17 significant digits.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace uccert
