#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Coupling kernels for pairs of Bernoulli random variables.
//
// A "kernel" assigns to marginal parameters (s, t) the joint probability
// Pi(0,0) = P(X=0, Y=0) of a coupling of X ~ Bernoulli(s), Y ~ Bernoulli(t).
// The remaining three cells of the joint table follow from the marginals.
// Everything downstream (PSD verification, the mixture optimizer) consumes
// kernels through the survival coordinates x = 1-s, y = 1-t, where the
// independent coupling is simply x*y.

namespace uccert {

enum class CouplingKind {
  IID,               // Pi(0,0) = (1-s)(1-t)
  MaxEntropy,        // Pi(0,0) = 1 - max(s, t, min(s+t, 1/2))
  CondIIDThreshold,  // common-threshold mixture, weight a_opt per coordinate
  CondIIDProduct,    // Pi(0,0) = (1-s)(1-t) + f(1-s) f(1-t)
};

std::string to_string(CouplingKind kind);

/// Parses the CLI spellings "iid", "maxent", "ciid-aopt", "ciid-xxbar".
CouplingKind coupling_kind_from_string(const std::string& name);

/// Optimal per-coordinate mixing weight a(t) for the common-threshold
/// conditionally-i.i.d. coupling:
///
///   t <= 1 - 1/sqrt(2) :  0
///   t <= 1/2           :  sqrt((1 - 2(1-t)^2) / (2 t (1-t)))
///   t >  1/2           :  1
///
/// Continuous on [0,1]; throws std::domain_error outside [0,1].
double a_opt(double t);

/// A coupling-kernel description. Product kernels carry the correction
/// function f(x) = scale * x * p(x) as a polynomial in ascending powers;
/// construction validates 0 <= f(x) <= min(x, 1-x) on a grid of 10^4
/// points, which is exactly the condition making the coupling a mixture of
/// two product distributions (hence conditionally i.i.d.).
class KernelSpec {
 public:
  static KernelSpec iid();
  static KernelSpec max_entropy();
  static KernelSpec ciid_threshold();

  /// Product kernel with f(x) = scale * x * p(x); `xp_coeffs` are the
  /// coefficients of x*p(x) in ascending powers (so xp_coeffs[0] == 0).
  static KernelSpec ciid_product(std::vector<double> xp_coeffs, double scale);

  /// The default product kernel f(x) = x(1-x).
  static KernelSpec ciid_xxbar();

  static KernelSpec from_kind(CouplingKind kind);

  CouplingKind kind() const { return kind_; }
  const std::vector<double>& f_coeffs() const { return f_coeffs_; }
  double scale() const { return scale_; }

  /// Correction value f(x) for product kernels; 0 for the other kinds.
  double correction(double x) const;

  std::string name() const { return to_string(kind_); }

 private:
  KernelSpec(CouplingKind kind, std::vector<double> f_coeffs, double scale);

  CouplingKind kind_;
  std::vector<double> f_coeffs_;  // coefficients of f, ascending powers
  double scale_;
};

/// Pi(0,0) in marginal coordinates: P(X=0,Y=0) for X ~ Bernoulli(s),
/// Y ~ Bernoulli(t). Throws std::domain_error for s or t outside [0,1].
double kernel_value(const KernelSpec& spec, double s, double t);

/// Pi(0,0) in survival coordinates x = 1-s, y = 1-t. Evaluated directly in
/// x (not via 1-x round trips) so grid matrices are built exactly.
double kernel_value_x(const KernelSpec& spec, double x, double y);

/// Full joint table of the coupling; cells are clamped at 0 when the
/// reconstruction produces negatives within -1e-12 (roundoff), and a
/// kernel that produces a genuinely negative cell throws
/// std::invalid_argument.
struct JointTable {
  double p00 = 0, p01 = 0, p10 = 0, p11 = 0;

  double marginal_s() const { return p10 + p11; }  // P(X=1)
  double marginal_t() const { return p01 + p11; }  // P(Y=1)
};

JointTable joint_table(const KernelSpec& spec, double s, double t);

/// Monte-Carlo sample of the coupling using its defining construction
/// (not the closed-form table, except for IID/MaxEntropy whose definition
/// is the table): threshold kernels draw a shared uniform plus independent
/// switch/local draws, product kernels draw a shared sign flip. Streams are
/// counter-based: 5 counters per sample, so results are reproducible and
/// independent of chunking.
struct SimulationResult {
  JointTable empirical;
  std::uint64_t n = 0;
};

SimulationResult simulate_protocol(const KernelSpec& spec, double s, double t,
                                   std::uint64_t n, std::uint64_t seed);

/// The convex-combination objective over the two-point family
/// P_S(b) = 1-a, P_S(1) = a:
///
///   (1-alpha) * (1-a)^2 h((1-b)^2)
///     + alpha * [ 2a h(me(1,b)) + (1-2a) h(me(b,b)) ]
///     - (1-a) h(b),
///
/// where me(s,t) = max(s, t, min(s+t, 1/2)) is the max-entropy overlap.
/// Nonnegativity of this quantity en route to the certified constant is
/// what the constants module's stationary pair (a*, b*) witnesses.
/// Preconditions: a in [0, 1/2], b in (0,1), alpha in [0,1].
double sawin_objective(double a, double b, double alpha);

}  // namespace uccert
