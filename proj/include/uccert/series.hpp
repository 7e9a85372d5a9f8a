#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>
#include <json.hpp>

// Exact-rational (and float) bivariate power series for the series form of
// the product-kernel positivity check. With
//
//   u = (x + y - xy)/2,        P = xy(1 + (1-x)(1-y)),
//   O = P log(1-u) + (1-P) log(1-P),
//
// the coefficient matrix [O]_{m,n} restricted to indices >= 2 must be
// positive semidefinite. The series engine is templated so the same code
// runs over exact rationals (certificate) and doubles (large orders).

namespace uccert {

using Rational = mpq_class;

template <class T>
class BivSeries {
 public:
  explicit BivSeries(int max_deg)
      : deg_(max_deg),
        c_(static_cast<std::size_t>(max_deg + 1) * (max_deg + 1), T(0)) {}

  int max_deg() const { return deg_; }

  T& at(int m, int n) { return c_[static_cast<std::size_t>(m) * (deg_ + 1) + n]; }
  const T& at(int m, int n) const {
    return c_[static_cast<std::size_t>(m) * (deg_ + 1) + n];
  }

  /// Product with box truncation (degrees in each variable capped at
  /// max_deg), which keeps every retained coefficient exact.
  BivSeries mul(const BivSeries& o) const {
    BivSeries r(deg_);
    for (int i1 = 0; i1 <= deg_; ++i1) {
      for (int j1 = 0; j1 <= deg_; ++j1) {
        const T& a = at(i1, j1);
        if (a == T(0)) continue;
        for (int i2 = 0; i2 + i1 <= deg_; ++i2) {
          for (int j2 = 0; j2 + j1 <= deg_; ++j2) {
            const T& b = o.at(i2, j2);
            if (b == T(0)) continue;
            r.at(i1 + i2, j1 + j2) += a * b;
          }
        }
      }
    }
    return r;
  }

  BivSeries& add_scaled(const BivSeries& o, const T& k) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += k * o.c_[i];
    return *this;
  }

  /// log(1 - u) = -sum_{k=1..kmax} u^k / k. The argument must have zero
  /// constant term; kmax must cover all contributing powers (u with lowest
  /// total degree d needs kmax >= 2*max_deg/d for box-exactness).
  static BivSeries log_one_minus(const BivSeries& u, int kmax) {
    BivSeries r(u.max_deg());
    BivSeries power = u;
    for (int k = 1; k <= kmax; ++k) {
      if (k > 1) power = power.mul(u);
      r.add_scaled(power, T(-1) / T(k));
    }
    return r;
  }

 private:
  int deg_;
  std::vector<T> c_;
};

/// The coefficient matrix of O through total index `order`, exact entries
/// plus their correctly-rounded double mirror.
struct SeriesMatrix {
  int order = 0;
  std::vector<Rational> exact;  // (order+1)^2, row-major
  Eigen::MatrixXd floats;       // rounded mirror of `exact`

  const Rational& at(int m, int n) const {
    return exact[static_cast<std::size_t>(m) * (order + 1) + n];
  }
};

/// Builds O exactly through the given order.
SeriesMatrix series_oracle(int order);

/// Independent double-precision engine (same algorithm instantiated over
/// double); used for orders where the exact build is too expensive.
Eigen::MatrixXd series_oracle_float(int order);

enum class SeriesLogKind { LogHalf, LogOneMinusI };

/// Combinatorial closed forms for the two log-series coefficient families:
///
///   LogHalf(m,n): coefficient of x^m y^n in log(1 - (x+y-xy)/2)
///     = -sum_{k=max(m,n)}^{m+n} (-1)^(m+n-k) C(k,k-n) C(n,k-m) / (k 2^k)
///
///   LogOneMinusI(m,n): candidate for the coefficient of x^m y^n in
///     log(1 - P)
///     = (-1)^(m+n+1) sum_{k=ceil(max(m,n)/2)}^{min(m,n)} (1/k) *
///         sum_d C(k, d+3k-m-n) C(m+n-d-2k, m-k-d) C(n-k, d)
///
/// LogHalf agrees with the series oracle everywhere tested; LogOneMinusI
/// disagrees starting at (1,1) (closed form -1, oracle -2) and is retained
/// verbatim so reports can surface the discrepancy. The oracle is
/// authoritative for certification.
Rational coeff_closed_form(SeriesLogKind kind, int m, int n);

struct ClosedFormComparison {
  int checked_through = 0;        // full index box (m,n) <= this was compared
  bool log_half_agrees = false;
  int log_one_minus_i_mismatches = 0;
  std::pair<int, int> first_mismatch{-1, -1};  // of LogOneMinusI
};

ClosedFormComparison compare_closed_forms(int max_index);

/// Symmetric rational LDL^T elimination. PSD iff every pivot is
/// nonnegative and zero pivots have zero columns below them; on failure a
/// rational witness x with x^T M x < 0 is produced (returned as doubles).
struct RationalLdltResult {
  bool psd = false;
  int fail_index = -1;              // column of the failing pivot
  std::vector<double> pivots;       // D diagonal (double approximations)
  std::vector<double> witness;      // empty when psd
  double witness_value = 0.0;       // x^T M x (exact value, rounded)
};

RationalLdltResult rational_ldlt_psd(const std::vector<Rational>& m, int n);

/// End-to-end series positivity check of [O]_{start..order}.
///
/// exact=true: rational LDL^T certificate (plus float eigenvalues of the
/// rounded matrix as diagnostics). exact=false: float path; entries are
/// rounded-exact for order <= 32 and from the double engine above that.
/// Raw double eigenvalues of the submatrix are meaningless at large order
/// (entries reach ~5.6e42 at order 90, so eps*norm swamps any gate); the
/// certification therefore gates on the Jacobi-scaled matrix
/// D^(-1/2) M D^(-1/2), a congruence that preserves semidefiniteness.
/// Both eigenvalues are reported.
struct SeriesPsdReport {
  int order = 0;
  int start = 2;
  bool exact_path = false;
  std::string engine;            // "exact" | "float-from-exact" | "float"
  bool certified = false;
  double min_eig_scaled = 0.0;   // Jacobi-scaled float eigenvalue
  double min_eig_raw = 0.0;      // unscaled float eigenvalue
  int fail_index = -1;
  std::vector<double> witness;
  double runtime_s = 0.0;

  nlohmann::ordered_json to_json() const;
};

SeriesPsdReport verify_series_psd(int order, int start, bool exact);

}  // namespace uccert
