#pragma once

namespace uccert {

/// Binary entropy in bits: h(s) = s*log2(1/s) + (1-s)*log2(1/(1-s)).
///
/// Uses the convention 0*log(0) = 0; inputs within 1e-15 of 0 or 1 return
/// exactly 0 so that degenerate atoms produced by floating-point kernel
/// arithmetic do not emit NaNs. Throws std::domain_error outside [0,1].
double binary_entropy(double s);

/// Derivative of binary_entropy: h'(s) = log2((1-s)/s), for s in (0,1).
/// Throws std::domain_error on the closed endpoints or outside [0,1].
double binary_entropy_deriv(double s);

/// The golden threshold (3 - sqrt(5)) / 2 = 0.38196601125010515...,
/// the unique root of (1-u)^2 = u in (0,1). It splits the two branches of
/// iid_entropy_gain and is the best certified constant for the
/// independent-coupling argument alone.
double golden_threshold();

/// Sharp lower bound for E[h(SBAR*TBAR)] / E[h(S)] over distributions of S
/// on [0,1] with E[S] = u, where S,T are i.i.d. and SBAR = 1-S:
///
///   u <= (3-sqrt(5))/2 :  h(2u - u^2) / h(u)      (point-mass extremizer)
///   u >  (3-sqrt(5))/2 :  (1-u) * 2/(sqrt(5)-1)   (linear continuation)
///
/// Continuous across the threshold, where both branches equal 1.
/// Throws std::domain_error for u outside the open interval (0,1).
double iid_entropy_gain(double u);

}  // namespace uccert
