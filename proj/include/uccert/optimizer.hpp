#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uccert/measures.hpp"

// Certification of the 9-dimensional mixture relaxation: minimize
//
//   [ (1-beta) E_{mu x mu}[h(XY)] + beta ( (1-q) Q(P0) + q Q(P1) ) ]
//     / E_mu[h(X)],
//
// over mixtures mu = (1-q) P0 + q P1 of three-atom measures subject to
// E_mu[x] >= 1-c, where Q(P) is the product-kernel quadratic form
// E_{P x P}[h(XY(1 + (1-X)(1-Y)))]. A minimum >= 1 certifies the constant c
// against this relaxation; the conjectured global minimizer is the
// two-point family member tied to (p*, x*).

namespace uccert {

/// Packed optimization variable (a1, a2, q, b0, b2, b4, b1, b3, b5) with
/// a3 = 1 - a1 - a2. Component P0 carries atoms {b0, b2, b4} and P1 atoms
/// {b1, b3, b5}, both weighted (a1, a2, a3); the mixture weight of P1 is q.
struct ThetaVector {
  std::array<double, 9> v{};

  double a1() const { return v[0]; }
  double a2() const { return v[1]; }
  double a3() const { return 1.0 - v[0] - v[1]; }
  double q() const { return v[2]; }
  std::array<double, 3> p0_atoms() const { return {v[3], v[4], v[5]}; }
  std::array<double, 3> p1_atoms() const { return {v[6], v[7], v[8]}; }

  /// Validation: all coordinates in [0,1] and a1 + a2 <= 1, within tol.
  bool valid(double tol = 1e-9) const;

  /// The mixture as measure objects (atoms merged per measure rules).
  MixturePair to_mixture() const;

  nlohmann::ordered_json to_json() const;
};

enum class SolverKind { NelderMead, ProjectedGradient };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);  // "nm" | "pg"

struct CertificationConfig {
  double c = 0.3827;
  double beta = 0.0;
  int n_starts = 1000;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::NelderMead;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;  // throws std::invalid_argument
};

/// Comparison of a minimizer against the conjectured two-point structure.
struct StructureMatch {
  bool is_degenerate_mixture = false;   // q in {0,1} or P0 == P1 within 1e-3
  std::vector<double> atom_distances;   // effective atoms vs {0, x*}
  double weight_error = 0.0;            // |top-atom weight - p*|
  double q_distance = 0.0;              // min(q, 1-q)
  bool matches_conjecture = false;
};

struct StartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  double ratio = 0.0;
};

struct LocalResult {
  ThetaVector theta;
  double ratio = 0.0;
  bool converged = false;
  double stationarity = 0.0;           // projected-gradient norm
  double constraint_violation = 0.0;   // max(0, (1-c) - mean)
};

struct CertificationReport {
  CertificationConfig config;
  double min_ratio = 0.0;     // over converged starts only
  ThetaVector argmin;
  StructureMatch structure;
  int n_converged = 0;
  int n_one_point = 0;        // converged runs collapsing to one atom
  std::vector<StartRecord> starts;
  bool certified = false;     // min_ratio >= 1 - 1e-6

  nlohmann::ordered_json to_json() const;
};

/// The ratio objective at theta. Throws std::domain_error when theta is
/// invalid or the denominator E_mu[h] vanishes (all atoms in {0,1}).
double objective(const ThetaVector& theta, double beta);

/// E_mu[x]; the feasible region is mean_constraint(theta) >= 1-c.
double mean_constraint(const ThetaVector& theta);

/// One local minimization from `start` (penalty Nelder-Mead rounds followed
/// by a projected-gradient polish, or projected gradient alone per
/// config.solver). Convergence = projected stationarity <= 1e-8 and
/// constraint violation <= 1e-9; non-converged runs are returned flagged,
/// never thrown.
LocalResult local_solve(const ThetaVector& start, const CertificationConfig& config);

/// Deterministic multistart certification. Start k draws its initial theta
/// from seed derive_seed(config.seed, k); starts run in parallel and are
/// aggregated in index order, so reports are bit-identical across runs and
/// thread counts. Throws std::runtime_error if no start converges.
CertificationReport certify(const CertificationConfig& config);

/// The conjectured optimizer at constraint level c: q = 0 and
/// P0 = {0 -> 1-p, x -> p} with p x = 1-c. At c = c_prime (within 1e-12)
/// this is exactly (p*, x*), which is simultaneously the family member with
/// p = h(x)/h(x^2) — the structure that makes the objective 1 for every
/// beta. Away from c_prime, x minimizes the beta-family objective along
/// p x = 1-c. Throws std::domain_error when no x in [1-c, 1) admits p <= 1.
ThetaVector conjectured_theta(double c, double beta);

/// Scalar objective along the two-point family at constraint level c:
/// p = (1-c)/x, value = p * [(1-beta) h(x^2) + beta h(x^2(1+(1-x)^2))] / h(x).
double family_ratio(double x, double beta, double c);

/// CSV trace (start_index, converged, ratio) at 17 significant digits.
void write_trace_csv(const CertificationReport& report, const std::string& path);

}  // namespace uccert
