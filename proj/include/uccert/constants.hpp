#pragma once

#include <map>
#include <string>

#include <json.hpp>

// Analytic constants of the certification chain, each solved from its
// defining equation by bracketing bisection or evaluated in closed form,
// together with the defining-equation residuals.

namespace uccert {

struct SolvedConstant {
  double value = 0.0;
  double residual = 0.0;     // |defining equation at the solved value|
  std::string equation;      // human-readable defining equation
};

struct ConstantsTable {
  double u_star = 0.0;      // root of (1-u)^2 = u
  double b_star = 0.0;      // larger root of h(b)(2-h(b)) = h((1-b)^2)
  double a_star = 0.0;      // (1 - h(b*)) / (2 - h(b*))
  double c_star = 0.0;      // (1-a*) b* + a*
  double alpha_star = 0.0;  // stationarizing weight of the two-point family
  double x_star = 0.0;      // root of x^2 (2 + (1-x)^2) = 1
  double p_star = 0.0;      // h(x*) / h(x*^2)
  double c_prime = 0.0;     // 1 - p* x*
  double beta_star = 0.0;   // stationarizing mixture weight at (p*, x*)

  // Alternate bracket reading of the beta stationarity display; lies
  // outside [0,1] and is kept in the table for the record only.
  double beta_star_alt = 0.0;

  std::map<std::string, SolvedConstant> entries;

  nlohmann::ordered_json to_json() const;
};

/// Root of (1-u)^2 = u in (0,1), i.e. (3 - sqrt(5))/2, by bisection.
double solve_threshold();

/// Larger of the exactly two roots of h(b)(2 - h(b)) = h((1-b)^2) in (0,1).
/// A sign scan over (0,1) brackets the roots; throws std::runtime_error
/// with the scanned sign pattern if the count differs from two.
double solve_bstar();

/// The smaller root of the same equation (rejected by the chain; exposed
/// so tests can assert the two-root structure).
double solve_bstar_small_root();

/// a = (1 - h(b)) / (2 - h(b)), the weight solving
/// (1-2a) h(1/2) = (1-a) h(b). Requires b in (0,1).
double compute_astar(double b);

/// Mean of the two-point extremizer: (1-a) b + a. Requires a,b in (0,1).
double compute_cstar(double a, double b);

/// Closed-form stationarizing weight of the convex-combination objective at
/// (a, b), with base-2 logarithms (consistent with entropy in bits):
///
///            -abar [2 abar h(bbar^2) - h(b)] + bbar [2 abar^2 bbar L + abar M]
///   alpha* = ---------------------------------------------------------------
///                    -2 abar [abar h(bbar^2) - 1] + 2 abar^2 bbar^2 L
///
/// where L = log2((1 - bbar^2)/bbar^2), M = log2(bbar/b).
/// Throws std::runtime_error on a vanishing denominator.
double compute_alphastar(double a, double b);

/// Root of x^2 (2 + (1-x)^2) = 1 in (0,1) by bisection; equivalently
/// 1 - x^2 = x^2 (1 + (1-x)^2).
double solve_xstar();

/// p = h(x) / h(x^2). May exceed 1 away from x*; callers that need a
/// probability must check. Throws std::domain_error when h(x^2) = 0.
double compute_pstar(double x);

/// Stationarizing mixture weight beta* at (p, x): writes the family value
/// as G0 + beta*G1 with
///   G0 = p^2 h(x^2) - p h(x),   G1 = p^2 [h(g(x)) - h(x^2)],
///   g(x) = x^2 (1 + (1-x)^2),
/// applies the constrained differential d(px) = 0 (dp/dx = -p/x) and solves
/// the resulting linear equation D G0 + beta D G1 = 0. Throws
/// std::runtime_error when the linear coefficient degenerates.
double solve_betastar(double p, double x);

/// Alternate reading that takes the mixed term verbatim as h(p^2(1+(1-p)^2))
/// (a function of p alone). Produces a weight outside [0,1]; retained for
/// the record.
double solve_betastar_alt(double p, double x);

/// Solves the whole table (every constant plus residuals and equations).
ConstantsTable solve_constants();

/// Cached table, solved once per process.
const ConstantsTable& constants();

}  // namespace uccert
