#include "uccert/psd_grid.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "uccert/entropy.hpp"
#include "uccert/report.hpp"

namespace uccert {

GridSpec GridSpec::from_separation_string(const std::string& separation,
                                          std::vector<int> degrees) {
  // Parse a plain decimal ("0.0004") and require that it divides 1 exactly
  // in decimal: with digits d and value num/10^d, we need num | 10^d.
  std::string digits;
  long long scale = 1;
  bool seen_dot = false, seen_digit = false;
  for (char ch : separation) {
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("separation: two decimal points");
      seen_dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("separation: invalid character in '" +
                                  separation + "'");
    }
    seen_digit = true;
    digits.push_back(ch);
    if (seen_dot) {
      if (scale > 1000000000000000LL) {
        throw std::invalid_argument("separation: too many decimal digits");
      }
      scale *= 10;
    }
  }
  if (!seen_digit) throw std::invalid_argument("separation: empty value");
  const long long num = std::stoll(digits);
  if (num <= 0 || num > scale) {
    throw std::invalid_argument("separation must lie in (0,1]: " + separation);
  }
  if (scale % num != 0) {
    throw std::invalid_argument("separation " + separation +
                                " does not divide 1 exactly in decimal");
  }
  return from_inv_sep(static_cast<int>(scale / num), std::move(degrees));
}

GridSpec GridSpec::from_inv_sep(int inv_sep, std::vector<int> degrees) {
  if (inv_sep < 1) throw std::invalid_argument("GridSpec: 1/separation < 1");
  if (degrees.empty()) {
    throw std::invalid_argument("GridSpec: need at least one constraint degree");
  }
  for (int d : degrees) {
    if (d < 0) throw std::invalid_argument("GridSpec: negative degree");
  }
  GridSpec g;
  g.inv_sep = inv_sep;
  g.constraint_degrees = std::move(degrees);
  return g;
}

std::vector<double> GridSpec::points() const {
  std::vector<double> xs(inv_sep + 1);
  for (int i = 0; i <= inv_sep; ++i) {
    xs[i] = static_cast<double>(i) / inv_sep;
  }
  return xs;
}

nlohmann::ordered_json GridSpec::to_json() const {
  return {{"separation", separation()},
          {"inv_sep", inv_sep},
          {"constraint_degrees", constraint_degrees}};
}

Eigen::MatrixXd build_grid_matrix(const KernelSpec& spec,
                                  const GridSpec& grid) {
  const std::vector<double> xs = grid.points();
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = -binary_entropy(kernel_value_x(spec, xs[i], xs[j]));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

GridPsdResult project_and_min_eig(const Eigen::MatrixXd& m,
                                  const GridSpec& grid) {
  const std::vector<double> xs = grid.points();
  const int n = static_cast<int>(xs.size());
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("project_and_min_eig: matrix/grid size mismatch");
  }
  const int k = static_cast<int>(grid.constraint_degrees.size());

  Eigen::MatrixXd v(n, k);
  for (int c = 0; c < k; ++c) {
    const int d = grid.constraint_degrees[c];
    for (int i = 0; i < n; ++i) {
      v(i, c) = std::pow(xs[i], d);  // 0^0 == 1 (constant column)
    }
  }

  GridPsdResult result;
  if (k >= n) {
    result.min_eig = std::numeric_limits<double>::infinity();
    result.subspace_dim = 0;
    result.certified = true;
    return result;
  }

  // Rank check first: a numerically dependent moment column means the
  // caller passed a redundant degree, which we refuse rather than silently
  // projecting twice.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(v);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() < k) {
    const auto perm = rank_qr.colsPermutation().indices();
    const int dropped = grid.constraint_degrees[perm[rank_qr.rank()]];
    throw std::runtime_error(
        "project_and_min_eig: moment columns are rank-deficient; degree " +
        std::to_string(dropped) + " is redundant");
  }

  // Null-space basis of V^T: the trailing n-k columns of the full Q factor.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd basis = q.rightCols(n - k);

  Eigen::MatrixXd projected = basis.transpose() * m * basis;
  projected = 0.5 * (projected + projected.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("project_and_min_eig: eigensolver failed");
  }
  result.min_eig = es.eigenvalues().minCoeff();
  result.subspace_dim = n - k;
  result.certified = result.min_eig >= -1e-10;
  return result;
}

nlohmann::ordered_json verify_grid_psd(const KernelSpec& spec,
                                       const GridSpec& grid) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd m = build_grid_matrix(spec, grid);
  const GridPsdResult r = project_and_min_eig(m, grid);
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  nlohmann::ordered_json j;
  j["kernel"] = spec.name();
  j["grid"] = grid.to_json();
  j["degrees"] = grid.constraint_degrees;
  j["min_eig"] = r.min_eig;
  j["subspace_dim"] = r.subspace_dim;
  j["certified"] = r.certified;
  j["runtime_s"] = dt;
  return j;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace uccert
