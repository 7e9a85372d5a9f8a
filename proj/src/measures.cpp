#include "uccert/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "uccert/entropy.hpp"

namespace uccert {

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms,
                                 std::vector<double> weights) {
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("DiscreteMeasure: atom/weight length mismatch");
  }
  if (atoms.empty()) {
    throw std::invalid_argument("DiscreteMeasure: empty support");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] >= 0.0 && atoms[i] <= 1.0)) {
      throw std::invalid_argument("DiscreteMeasure: atom " +
                                  std::to_string(atoms[i]) + " outside [0,1]");
    }
    if (weights[i] < -1e-15) {
      throw std::invalid_argument("DiscreteMeasure: negative weight " +
                                  std::to_string(weights[i]));
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteMeasure: weights sum to " +
                                std::to_string(total) + ", expected 1");
  }

  std::vector<std::size_t> idx(atoms.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t k : idx) {
    const double x = atoms[k], w = weights[k];
    if (w <= 0.0) continue;  // zero-weight atoms carry no information
    if (!atoms_.empty() && x - atoms_.back() < 1e-10) {
      // Merge: add weights, keep the weighted-average position so the mean
      // is unchanged.
      const double ws = weights_.back() + w;
      atoms_.back() = (atoms_.back() * weights_.back() + x * w) / ws;
      weights_.back() = ws;
    } else {
      atoms_.push_back(x);
      weights_.push_back(w);
    }
  }
  if (atoms_.empty()) {
    throw std::invalid_argument("DiscreteMeasure: all weights are zero");
  }
}

DiscreteMeasure DiscreteMeasure::delta(double x) {
  return DiscreteMeasure({x}, {1.0});
}

nlohmann::ordered_json DiscreteMeasure::to_json() const {
  return {{"atoms", atoms_}, {"weights", weights_}};
}

double mean(const DiscreteMeasure& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    r += mu.weights()[i] * mu.atoms()[i];
  }
  return r;
}

double expect_h(const DiscreteMeasure& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    r += mu.weights()[i] * binary_entropy(mu.atoms()[i]);
  }
  return r;
}

double quad_form_h(const KernelSpec& spec, const DiscreteMeasure& mu,
                   const DiscreteMeasure& nu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double wi = mu.weights()[i], xi = mu.atoms()[i];
    for (std::size_t j = 0; j < nu.size(); ++j) {
      r += wi * nu.weights()[j] *
           binary_entropy(kernel_value_x(spec, xi, nu.atoms()[j]));
    }
  }
  return r;
}

MixturePair::MixturePair(double q_in, DiscreteMeasure p0_in,
                         DiscreteMeasure p1_in)
    : q(q_in), p0(std::move(p0_in)), p1(std::move(p1_in)) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("MixturePair: q outside [0,1]");
  }
}

DiscreteMeasure MixturePair::blended() const {
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    atoms.push_back(p0.atoms()[i]);
    weights.push_back((1.0 - q) * p0.weights()[i]);
  }
  for (std::size_t i = 0; i < p1.size(); ++i) {
    atoms.push_back(p1.atoms()[i]);
    weights.push_back(q * p1.weights()[i]);
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace uccert
