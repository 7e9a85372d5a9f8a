#include "uccert/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uccert {

double binary_entropy(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("binary_entropy: argument " + std::to_string(s) +
                            " outside [0,1]");
  }
  if (s < 1e-15 || s > 1.0 - 1e-15) return 0.0;
  return -s * std::log2(s) - (1.0 - s) * std::log2(1.0 - s);
}

double binary_entropy_deriv(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::domain_error("binary_entropy_deriv: argument " +
                            std::to_string(s) + " outside (0,1)");
  }
  return std::log2((1.0 - s) / s);
}

double golden_threshold() { return (3.0 - std::sqrt(5.0)) / 2.0; }

double iid_entropy_gain(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("iid_entropy_gain: argument " + std::to_string(u) +
                            " outside (0,1)");
  }
  if (u <= golden_threshold()) {
    return binary_entropy(2.0 * u - u * u) / binary_entropy(u);
  }
  return (1.0 - u) * 2.0 / (std::sqrt(5.0) - 1.0);
}

}  // namespace uccert
