#pragma once

#include <vector>

#include <json.hpp>

#include "uccert/kernels.hpp"

// Finitely supported probability measures on [0,1], in survival coordinates
// (an atom at x corresponds to a Bernoulli parameter s = 1-x), plus the
// entropy functionals the certification objective is built from.

namespace uccert {

class DiscreteMeasure {
 public:
  /// Validates: equal lengths, atoms in [0,1], weights >= -1e-15, total
  /// weight within 1e-12 of 1. Atoms are sorted; atoms closer than 1e-10
  /// are merged (weights added, position averaged by weight) and atoms of
  /// nonpositive weight are dropped, so the stored support is strictly
  /// increasing with positive weights. Throws std::invalid_argument.
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

  static DiscreteMeasure delta(double x);

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

  nlohmann::ordered_json to_json() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// E[x] under mu.
double mean(const DiscreteMeasure& mu);

/// E[h(x)] under mu.
double expect_h(const DiscreteMeasure& mu);

/// Double integral of h(kernel_value_x(spec, x, y)) d mu(x) d nu(y).
/// Bilinear in (mu, nu); symmetric in its arguments for every kernel kind
/// (all kernels are symmetric functions of (x, y)).
double quad_form_h(const KernelSpec& spec, const DiscreteMeasure& mu,
                   const DiscreteMeasure& nu);

/// A two-component mixture q_bar * p0 + q * p1.
struct MixturePair {
  double q = 0.0;
  DiscreteMeasure p0;
  DiscreteMeasure p1;

  MixturePair(double q_in, DiscreteMeasure p0_in, DiscreteMeasure p1_in);

  /// The blended measure (1-q) p0 + q p1.
  DiscreteMeasure blended() const;
};

}  // namespace uccert
