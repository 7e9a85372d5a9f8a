#include "uccert/series.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace uccert {

namespace {

/// O = P log(1-u) + (1-P) log(1-P) with u = (x+y-xy)/2 and
/// P = 2xy - x^2 y - x y^2 + x^2 y^2, instantiated over T.
/// u has lowest total degree 1, so log(1-u) needs 2*order powers for
/// box-exactness; P has lowest total degree 2, so `order` powers suffice.
template <class T>
BivSeries<T> build_o_series(int order) {
  BivSeries<T> u(order);
  u.at(1, 0) = T(1) / T(2);
  u.at(0, 1) = T(1) / T(2);
  u.at(1, 1) = T(-1) / T(2);

  BivSeries<T> p(order);
  p.at(1, 1) = T(2);
  if (order >= 2) {
    p.at(2, 1) = T(-1);
    p.at(1, 2) = T(-1);
    p.at(2, 2) = T(1);
  }

  BivSeries<T> log_u = BivSeries<T>::log_one_minus(u, 2 * order);
  BivSeries<T> log_p = BivSeries<T>::log_one_minus(p, order);

  BivSeries<T> o = p.mul(log_u);
  BivSeries<T> one_minus_p(order);
  one_minus_p.add_scaled(p, T(-1));
  one_minus_p.at(0, 0) += T(1);
  o.add_scaled(one_minus_p.mul(log_p), T(1));
  return o;
}

mpz_class binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, int start, int order) {
  const int n = order - start + 1;
  return m.block(start, start, n, n);
}

double min_eig_sym(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("series eigensolver failed");
  }
  return es.eigenvalues().minCoeff();
}

/// Diagonal congruence D^(-1/2) M D^(-1/2); preserves semidefiniteness and
/// tames the huge dynamic range of the raw coefficients.
Eigen::MatrixXd jacobi_scale(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mii = std::abs(m(i, i));
    d(i) = mii > 0.0 ? 1.0 / std::sqrt(mii) : 1.0;
  }
  return d.asDiagonal() * m * d.asDiagonal();
}

}  // namespace

SeriesMatrix series_oracle(int order) {
  if (order < 2) throw std::invalid_argument("series_oracle: order must be >= 2");
  const BivSeries<Rational> o = build_o_series<Rational>(order);
  SeriesMatrix sm;
  sm.order = order;
  sm.exact.resize(static_cast<std::size_t>(order + 1) * (order + 1));
  sm.floats.resize(order + 1, order + 1);
  for (int m = 0; m <= order; ++m) {
    for (int n = 0; n <= order; ++n) {
      const Rational& c = o.at(m, n);
      sm.exact[static_cast<std::size_t>(m) * (order + 1) + n] = c;
      sm.floats(m, n) = c.get_d();
    }
  }
  return sm;
}

Eigen::MatrixXd series_oracle_float(int order) {
  if (order < 2) {
    throw std::invalid_argument("series_oracle_float: order must be >= 2");
  }
  const BivSeries<double> o = build_o_series<double>(order);
  Eigen::MatrixXd m(order + 1, order + 1);
  for (int i = 0; i <= order; ++i) {
    for (int j = 0; j <= order; ++j) m(i, j) = o.at(i, j);
  }
  return m;
}

Rational coeff_closed_form(SeriesLogKind kind, int m, int n) {
  if (m < 0 || n < 0) {
    throw std::invalid_argument("coeff_closed_form: negative index");
  }
  if (kind == SeriesLogKind::LogHalf) {
    if (m == 0 && n == 0) return 0;
    Rational s = 0;
    for (long k = std::max(m, n); k <= m + n; ++k) {
      const int sign = ((m + n - k) % 2 == 0) ? 1 : -1;
      mpz_class num = binomial(k, k - n) * binomial(n, k - m) * sign;
      mpz_class den = mpz_class(k) << k;  // k * 2^k
      s += Rational(num, den);
    }
    s.canonicalize();
    return -s;
  }
  // LogOneMinusI
  if (m == 0 || n == 0) return 0;
  Rational s = 0;
  const long kmin = (std::max(m, n) + 1) / 2;  // ceil(max/2)
  for (long k = kmin; k <= std::min(m, n); ++k) {
    mpz_class inner = 0;
    const long dlo = std::max<long>(m + n - 3 * k, 0);
    const long dhi = std::min(m, n) - k;
    for (long d = dlo; d <= dhi; ++d) {
      inner += binomial(k, d + 3 * k - m - n) *
               binomial(m + n - d - 2 * k, m - k - d) * binomial(n - k, d);
    }
    s += Rational(inner, mpz_class(k));
  }
  s.canonicalize();
  const int sign = ((m + n + 1) % 2 == 0) ? 1 : -1;
  return sign * s;
}

ClosedFormComparison compare_closed_forms(int max_index) {
  // Build the two log series exactly; box truncation keeps every retained
  // coefficient exact, so all (m,n) with m,n <= max_index are comparable.
  BivSeries<Rational> u(max_index);
  u.at(1, 0) = Rational(1, 2);
  u.at(0, 1) = Rational(1, 2);
  u.at(1, 1) = Rational(-1, 2);
  BivSeries<Rational> p(max_index);
  p.at(1, 1) = 2;
  if (max_index >= 2) {
    p.at(2, 1) = -1;
    p.at(1, 2) = -1;
    p.at(2, 2) = 1;
  }
  const auto log_u = BivSeries<Rational>::log_one_minus(u, 2 * max_index);
  const auto log_p = BivSeries<Rational>::log_one_minus(p, max_index);

  ClosedFormComparison cmp;
  cmp.checked_through = max_index;
  cmp.log_half_agrees = true;
  for (int m = 0; m <= max_index; ++m) {
    for (int n = 0; n <= max_index; ++n) {
      if (coeff_closed_form(SeriesLogKind::LogHalf, m, n) != log_u.at(m, n)) {
        cmp.log_half_agrees = false;
      }
      if (coeff_closed_form(SeriesLogKind::LogOneMinusI, m, n) !=
          log_p.at(m, n)) {
        ++cmp.log_one_minus_i_mismatches;
        if (cmp.first_mismatch.first < 0) cmp.first_mismatch = {m, n};
      }
    }
  }
  return cmp;
}

RationalLdltResult rational_ldlt_psd(const std::vector<Rational>& m, int n) {
  if (static_cast<int>(m.size()) != n * n) {
    throw std::invalid_argument("rational_ldlt_psd: size mismatch");
  }
  std::vector<Rational> a = m;  // working copy, lower triangle maintained
  std::vector<Rational> lmat(static_cast<std::size_t>(n) * n, Rational(0));
  auto at = [&](std::vector<Rational>& v, int i, int j) -> Rational& {
    return v[static_cast<std::size_t>(i) * n + j];
  };

  RationalLdltResult result;
  result.pivots.reserve(n);

  // Back-substitutes L^T x = w for the already-eliminated coordinates
  // (< fail column), turning a reduced-space witness into a full one.
  auto expand_witness = [&](std::vector<Rational> w, int fail_col) {
    for (int i = fail_col - 1; i >= 0; --i) {
      Rational acc = w[static_cast<std::size_t>(i)];
      for (int k = i + 1; k < n; ++k) {
        acc -= at(lmat, k, i) * w[static_cast<std::size_t>(k)];
      }
      w[static_cast<std::size_t>(i)] = acc;
    }
    // x^T M x computed exactly as a final integrity check.
    Rational val = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        val += w[static_cast<std::size_t>(i)] *
               m[static_cast<std::size_t>(i) * n + j] *
               w[static_cast<std::size_t>(j)];
      }
    }
    result.witness.resize(n);
    for (int i = 0; i < n; ++i) {
      result.witness[static_cast<std::size_t>(i)] =
          w[static_cast<std::size_t>(i)].get_d();
    }
    result.witness_value = val.get_d();
  };

  for (int j = 0; j < n; ++j) {
    const Rational d = at(a, j, j);
    result.pivots.push_back(d.get_d());
    at(lmat, j, j) = 1;

    if (d < 0) {
      result.psd = false;
      result.fail_index = j;
      std::vector<Rational> w(static_cast<std::size_t>(n), Rational(0));
      w[static_cast<std::size_t>(j)] = 1;  // x^T M x = d < 0
      expand_witness(std::move(w), j);
      return result;
    }
    if (d == 0) {
      for (int i = j + 1; i < n; ++i) {
        if (at(a, i, j) != 0) {
          // [[0, c],[c, a_ii]] is indefinite: (t, 1) with t = -(a_ii+1)/(2c)
          // gives value -1 in the reduced metric.
          result.psd = false;
          result.fail_index = j;
          const Rational c = at(a, i, j);
          const Rational aii = at(a, i, i);
          std::vector<Rational> w(static_cast<std::size_t>(n), Rational(0));
          w[static_cast<std::size_t>(j)] = -(aii + 1) / (2 * c);
          w[static_cast<std::size_t>(i)] = 1;
          expand_witness(std::move(w), j);
          return result;
        }
      }
      continue;  // zero pivot with zero column: PSD so far, skip elimination
    }
    for (int i = j + 1; i < n; ++i) {
      const Rational f = at(a, i, j) / d;
      at(lmat, i, j) = f;
      if (f == 0) continue;
      for (int k = j + 1; k <= i; ++k) {
        at(a, i, k) -= f * at(a, j, k);
      }
    }
    // Mirror the updated lower triangle into row j+1.. upper entries we
    // still read (a(j, k) above uses row j which is final by now).
    for (int i = j + 1; i < n; ++i) {
      for (int k = j + 1; k < i; ++k) at(a, k, i) = at(a, i, k);
    }
  }
  result.psd = true;
  return result;
}

SeriesPsdReport verify_series_psd(int order, int start, bool exact) {
  if (start < 0 || start > order) {
    throw std::invalid_argument("verify_series_psd: start outside [0, order]");
  }
  const auto t0 = std::chrono::steady_clock::now();
  SeriesPsdReport report;
  report.order = order;
  report.start = start;
  report.exact_path = exact;

  const int n = order - start + 1;
  if (exact) {
    const SeriesMatrix sm = series_oracle(order);
    std::vector<Rational> sub(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sub[static_cast<std::size_t>(i) * n + j] = sm.at(start + i, start + j);
      }
    }
    const RationalLdltResult ldlt = rational_ldlt_psd(sub, n);
    report.engine = "exact";
    report.certified = ldlt.psd;
    report.fail_index = ldlt.fail_index;
    report.witness = ldlt.witness;
    const Eigen::MatrixXd fsub = submatrix(sm.floats, start, order);
    report.min_eig_raw = min_eig_sym(fsub);
    report.min_eig_scaled = min_eig_sym(jacobi_scale(fsub));
  } else {
    Eigen::MatrixXd floats;
    if (order <= 32) {
      floats = series_oracle(order).floats;
      report.engine = "float-from-exact";
    } else {
      floats = series_oracle_float(order);
      report.engine = "float";
    }
    const Eigen::MatrixXd fsub = submatrix(floats, start, order);
    report.min_eig_raw = min_eig_sym(fsub);
    report.min_eig_scaled = min_eig_sym(jacobi_scale(fsub));
    report.certified = report.min_eig_scaled >= -1e-10;
  }
  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

nlohmann::ordered_json SeriesPsdReport::to_json() const {
  nlohmann::ordered_json j;
  j["order"] = order;
  j["start"] = start;
  j["exact"] = exact_path;
  j["engine"] = engine;
  j["certified"] = certified;
  j["min_eig_scaled"] = min_eig_scaled;
  j["min_eig_raw"] = min_eig_raw;
  if (fail_index >= 0) {
    j["fail_index"] = fail_index;
    j["witness"] = witness;
  }
  j["runtime_s"] = runtime_s;
  return j;
}

}  // namespace uccert
