#include "uccert/constants.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uccert/entropy.hpp"
#include "uccert/kernels.hpp"

namespace uccert {

namespace {

using ScalarFn = std::function<double(double)>;

/// Bisection on a bracketing interval, iterated to the floating-point
/// fixpoint (midpoint equals an endpoint), i.e. well below 1e-14.
double bisect(const ScalarFn& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::runtime_error("bisect: endpoints do not bracket a sign change");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

struct SignScan {
  std::vector<std::pair<double, double>> brackets;
  std::string pattern;  // compressed sign pattern, e.g. "+-+"
};

SignScan scan_sign_changes(const ScalarFn& f, double lo, double hi, int n) {
  SignScan scan;
  double prev_x = lo;
  double prev_f = f(lo);
  scan.pattern.push_back(prev_f >= 0.0 ? '+' : '-');
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / n;
    const double fx = f(x);
    const char sign = fx >= 0.0 ? '+' : '-';
    if (sign != scan.pattern.back()) {
      scan.brackets.emplace_back(prev_x, x);
      scan.pattern.push_back(sign);
    }
    prev_x = x;
    prev_f = fx;
  }
  (void)prev_f;
  return scan;
}

double bstar_equation(double b) {
  const double hb = binary_entropy(b);
  const double bbar = 1.0 - b;
  return hb * (2.0 - hb) - binary_entropy(bbar * bbar);
}

/// The two roots of the b-equation, ordered.
std::pair<double, double> solve_bstar_roots() {
  const auto scan = scan_sign_changes(bstar_equation, 1e-6, 1.0 - 1e-6, 4000);
  if (scan.brackets.size() != 2) {
    std::ostringstream oss;
    oss << "solve_bstar: expected exactly two roots, sign scan found "
        << scan.brackets.size() << " (pattern " << scan.pattern << ")";
    throw std::runtime_error(oss.str());
  }
  const double lo_root =
      bisect(bstar_equation, scan.brackets[0].first, scan.brackets[0].second);
  const double hi_root =
      bisect(bstar_equation, scan.brackets[1].first, scan.brackets[1].second);
  return {lo_root, hi_root};
}

/// g(x) = x^2 (1 + (1-x)^2), the product-kernel diagonal, and g'.
double gfun(double x) {
  const double xb = 1.0 - x;
  return x * x * (1.0 + xb * xb);
}

double gfun_deriv(double x) {
  const double xb = 1.0 - x;
  return 2.0 * x * (1.0 + xb * xb) - 2.0 * x * x * xb;
}

/// Directional derivative of F(p,x) along d(px) = 0, i.e.
/// D = d/dx - (p/x) d/dp, applied to the two family pieces
/// G0 = p^2 h(x^2) - p h(x) and G1 = p^2 [h(g(x)) - h(x^2)].
double dg0(double p, double x) {
  const double x2 = x * x;
  const double dx = 2.0 * x * p * p * binary_entropy_deriv(x2) -
                    p * binary_entropy_deriv(x);
  const double dp = 2.0 * p * binary_entropy(x2) - binary_entropy(x);
  return dx - (p / x) * dp;
}

double dg1(double p, double x) {
  const double x2 = x * x;
  const double g = gfun(x);
  const double dx = p * p * (binary_entropy_deriv(g) * gfun_deriv(x) -
                             2.0 * x * binary_entropy_deriv(x2));
  const double dp = 2.0 * p * (binary_entropy(g) - binary_entropy(x2));
  return dx - (p / x) * dp;
}

/// Alternate verbatim reading: the mixed term as h(p^2(1+(1-p)^2)), a
/// function of p alone, so G1A = h(q(p)) - p^2 h(x^2).
double dg1_alt(double p, double x) {
  const double x2 = x * x;
  const double pb = 1.0 - p;
  const double qp = p * p * (1.0 + pb * pb);
  const double qprime = 2.0 * p * (1.0 + pb * pb) - 2.0 * p * p * pb;
  const double dx = -2.0 * x * p * p * binary_entropy_deriv(x2);
  const double dp =
      binary_entropy_deriv(qp) * qprime - 2.0 * p * binary_entropy(x2);
  return dx - (p / x) * dp;
}

void require_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::domain_error(std::string(what) + " = " + std::to_string(v) +
                            " outside (0,1)");
  }
}

}  // namespace

double solve_threshold() {
  return bisect([](double u) { return (1.0 - u) * (1.0 - u) - u; }, 0.0, 1.0);
}

double solve_bstar() { return solve_bstar_roots().second; }

double solve_bstar_small_root() { return solve_bstar_roots().first; }

double compute_astar(double b) {
  require_open_unit(b, "compute_astar: b");
  const double hb = binary_entropy(b);
  return (1.0 - hb) / (2.0 - hb);
}

double compute_cstar(double a, double b) {
  require_open_unit(a, "compute_cstar: a");
  require_open_unit(b, "compute_cstar: b");
  return (1.0 - a) * b + a;
}

double compute_alphastar(double a, double b) {
  require_open_unit(a, "compute_alphastar: a");
  require_open_unit(b, "compute_alphastar: b");
  const double abar = 1.0 - a, bbar = 1.0 - b;
  const double bb2 = bbar * bbar;
  const double h_bb2 = binary_entropy(bb2);
  const double h_b = binary_entropy(b);
  const double log_ratio = std::log2((1.0 - bb2) / bb2);
  const double log_bbar_b = std::log2(bbar / b);
  const double num = -abar * (2.0 * abar * h_bb2 - h_b) +
                     bbar * (2.0 * abar * abar * bbar * log_ratio +
                             abar * log_bbar_b);
  const double den = -2.0 * abar * (abar * h_bb2 - 1.0) +
                     2.0 * abar * abar * bb2 * log_ratio;
  if (std::abs(den) < 1e-300) {
    throw std::runtime_error("compute_alphastar: vanishing denominator");
  }
  return num / den;
}

double solve_xstar() {
  return bisect(
      [](double x) {
        const double xb = 1.0 - x;
        return x * x * (2.0 + xb * xb) - 1.0;
      },
      0.0, 1.0);
}

double compute_pstar(double x) {
  require_open_unit(x, "compute_pstar: x");
  const double hx2 = binary_entropy(x * x);
  if (hx2 == 0.0) {
    throw std::domain_error("compute_pstar: h(x^2) = 0 at x = " +
                            std::to_string(x));
  }
  return binary_entropy(x) / hx2;
}

double solve_betastar(double p, double x) {
  const double d0 = dg0(p, x);
  const double d1 = dg1(p, x);
  if (std::abs(d1) < 1e-300) {
    throw std::runtime_error("solve_betastar: degenerate linear coefficient");
  }
  return -d0 / d1;
}

double solve_betastar_alt(double p, double x) {
  const double d0 = dg0(p, x);
  const double d1 = dg1_alt(p, x);
  if (std::abs(d1) < 1e-300) {
    throw std::runtime_error(
        "solve_betastar_alt: degenerate linear coefficient");
  }
  return -d0 / d1;
}

ConstantsTable solve_constants() {
  ConstantsTable t;
  t.u_star = solve_threshold();
  t.b_star = solve_bstar();
  t.a_star = compute_astar(t.b_star);
  t.c_star = compute_cstar(t.a_star, t.b_star);
  t.alpha_star = compute_alphastar(t.a_star, t.b_star);
  t.x_star = solve_xstar();
  t.p_star = compute_pstar(t.x_star);
  t.c_prime = 1.0 - t.p_star * t.x_star;
  t.beta_star = solve_betastar(t.p_star, t.x_star);
  t.beta_star_alt = solve_betastar_alt(t.p_star, t.x_star);

  const double ub = 1.0 - t.u_star;
  const double hb = binary_entropy(t.b_star);
  const double bb = 1.0 - t.b_star;
  const double xb = 1.0 - t.x_star;

  t.entries["u_star"] = {t.u_star, std::abs(ub * ub - t.u_star),
                         "(1-u)^2 = u"};
  t.entries["b_star"] = {
      t.b_star,
      std::abs(hb * (2.0 - hb) - binary_entropy(bb * bb)),
      "h(b)(2-h(b)) = h((1-b)^2), larger root"};
  t.entries["a_star"] = {
      t.a_star,
      std::abs((1.0 - 2.0 * t.a_star) - (1.0 - t.a_star) * hb),
      "(1-2a) h(1/2) = (1-a) h(b*)"};
  t.entries["c_star"] = {t.c_star, 0.0, "c* = (1-a*) b* + a*"};
  t.entries["alpha_star"] = {
      t.alpha_star,
      std::abs(sawin_objective(t.a_star, t.b_star, t.alpha_star)),
      "stationarizing weight; residual = objective value at (a*, b*)"};
  t.entries["x_star"] = {
      t.x_star,
      std::abs(t.x_star * t.x_star * (2.0 + xb * xb) - 1.0),
      "x^2 (2 + (1-x)^2) = 1"};
  t.entries["p_star"] = {
      t.p_star,
      std::abs(t.p_star * t.p_star * binary_entropy(t.x_star * t.x_star) -
               t.p_star * binary_entropy(t.x_star)),
      "p^2 h(x*^2) = p h(x*)"};
  t.entries["c_prime"] = {t.c_prime, 0.0, "c' = 1 - p* x*"};
  t.entries["beta_star"] = {
      t.beta_star,
      std::abs(dg0(t.p_star, t.x_star) +
               t.beta_star * dg1(t.p_star, t.x_star)),
      "D G0 + beta D G1 = 0 along d(px) = 0 (mixture-objective reading)"};
  t.entries["beta_star_alt"] = {
      t.beta_star_alt,
      std::abs(dg0(t.p_star, t.x_star) +
               t.beta_star_alt * dg1_alt(t.p_star, t.x_star)),
      "alternate verbatim reading with h(p^2(1+(1-p)^2)); outside [0,1], "
      "rejected; recorded for reference"};
  return t;
}

const ConstantsTable& constants() {
  static const ConstantsTable table = solve_constants();
  return table;
}

nlohmann::ordered_json ConstantsTable::to_json() const {
  static const char* order[] = {"u_star",     "b_star",  "a_star",
                                "c_star",     "alpha_star", "x_star",
                                "p_star",     "c_prime", "beta_star",
                                "beta_star_alt"};
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const char* name : order) {
    const auto it = entries.find(name);
    if (it == entries.end()) continue;
    j[name] = {{"value", it->second.value},
               {"residual", it->second.residual},
               {"defining_equation_text", it->second.equation}};
  }
  return j;
}

}  // namespace uccert
