#include "uccert/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "uccert/entropy.hpp"
#include "uccert/rng.hpp"

namespace uccert {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " = " + std::to_string(v) +
                            " outside [0,1]");
  }
}

/// max-entropy overlap m(s,t) = max(s, t, min(s+t, 1/2)).
double max_entropy_overlap(double s, double t) {
  return std::max({s, t, std::min(s + t, 0.5)});
}

double eval_poly(const std::vector<double>& coeffs, double x) {
  double r = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
  return r;
}

}  // namespace

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::IID: return "iid";
    case CouplingKind::MaxEntropy: return "maxent";
    case CouplingKind::CondIIDThreshold: return "ciid-aopt";
    case CouplingKind::CondIIDProduct: return "ciid-xxbar";
  }
  throw std::logic_error("unknown coupling kind");
}

CouplingKind coupling_kind_from_string(const std::string& name) {
  if (name == "iid") return CouplingKind::IID;
  if (name == "maxent") return CouplingKind::MaxEntropy;
  if (name == "ciid-aopt") return CouplingKind::CondIIDThreshold;
  if (name == "ciid-xxbar") return CouplingKind::CondIIDProduct;
  throw std::invalid_argument("unknown kernel name: " + name);
}

double a_opt(double t) {
  require_unit(t, "a_opt: t");
  const double lo = 1.0 - 1.0 / std::sqrt(2.0);
  if (t <= lo) return 0.0;
  if (t > 0.5) return 1.0;
  const double tb = 1.0 - t;
  return std::sqrt((1.0 - 2.0 * tb * tb) / (2.0 * t * tb));
}

KernelSpec::KernelSpec(CouplingKind kind, std::vector<double> f_coeffs,
                       double scale)
    : kind_(kind), f_coeffs_(std::move(f_coeffs)), scale_(scale) {
  if (kind_ != CouplingKind::CondIIDProduct) return;
  if (f_coeffs_.empty() || f_coeffs_[0] != 0.0) {
    throw std::invalid_argument(
        "product kernel: f must vanish at 0 (xp_coeffs[0] == 0)");
  }
  // Mixture representability: 0 <= f(x) <= min(x, 1-x) pointwise.
  constexpr int n_check = 10000;
  for (int i = 0; i <= n_check; ++i) {
    const double x = static_cast<double>(i) / n_check;
    const double fx = correction(x);
    if (fx < -1e-12 || fx > std::min(x, 1.0 - x) + 1e-12) {
      throw std::invalid_argument(
          "product kernel: f violates 0 <= f(x) <= min(x,1-x) at x = " +
          std::to_string(x) + " (f = " + std::to_string(fx) + ")");
    }
  }
}

KernelSpec KernelSpec::iid() { return {CouplingKind::IID, {}, 0.0}; }

KernelSpec KernelSpec::max_entropy() {
  return {CouplingKind::MaxEntropy, {}, 0.0};
}

KernelSpec KernelSpec::ciid_threshold() {
  return {CouplingKind::CondIIDThreshold, {}, 0.0};
}

KernelSpec KernelSpec::ciid_product(std::vector<double> xp_coeffs,
                                    double scale) {
  return {CouplingKind::CondIIDProduct, std::move(xp_coeffs), scale};
}

KernelSpec KernelSpec::ciid_xxbar() {
  return ciid_product({0.0, 1.0, -1.0}, 1.0);  // f(x) = x - x^2
}

KernelSpec KernelSpec::from_kind(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::IID: return iid();
    case CouplingKind::MaxEntropy: return max_entropy();
    case CouplingKind::CondIIDThreshold: return ciid_threshold();
    case CouplingKind::CondIIDProduct: return ciid_xxbar();
  }
  throw std::logic_error("unknown coupling kind");
}

double KernelSpec::correction(double x) const {
  if (kind_ != CouplingKind::CondIIDProduct) return 0.0;
  return scale_ * eval_poly(f_coeffs_, x);
}

double kernel_value_x(const KernelSpec& spec, double x, double y) {
  require_unit(x, "kernel_value_x: x");
  require_unit(y, "kernel_value_x: y");
  switch (spec.kind()) {
    case CouplingKind::IID:
      return x * y;
    case CouplingKind::MaxEntropy:
      return 1.0 - max_entropy_overlap(1.0 - x, 1.0 - y);
    case CouplingKind::CondIIDThreshold: {
      const double ax = a_opt(1.0 - x), ay = a_opt(1.0 - y);
      return x * y + ax * ay * (std::min(x, y) - x * y);
    }
    case CouplingKind::CondIIDProduct:
      return x * y + spec.correction(x) * spec.correction(y);
  }
  throw std::logic_error("unknown coupling kind");
}

double kernel_value(const KernelSpec& spec, double s, double t) {
  require_unit(s, "kernel_value: s");
  require_unit(t, "kernel_value: t");
  if (spec.kind() == CouplingKind::MaxEntropy) {
    return 1.0 - max_entropy_overlap(s, t);
  }
  return kernel_value_x(spec, 1.0 - s, 1.0 - t);
}

JointTable joint_table(const KernelSpec& spec, double s, double t) {
  const double p00 = kernel_value(spec, s, t);
  JointTable table;
  table.p00 = p00;
  table.p01 = (1.0 - s) - p00;
  table.p10 = (1.0 - t) - p00;
  table.p11 = 1.0 - (1.0 - s) - (1.0 - t) + p00;
  for (double* cell : {&table.p00, &table.p01, &table.p10, &table.p11}) {
    if (*cell < -1e-12) {
      throw std::invalid_argument("joint_table: kernel produces cell " +
                                  std::to_string(*cell) + " < 0 at s=" +
                                  std::to_string(s) + ", t=" + std::to_string(t));
    }
    *cell = std::max(*cell, 0.0);
  }
  return table;
}

SimulationResult simulate_protocol(const KernelSpec& spec, double s, double t,
                                   std::uint64_t n, std::uint64_t seed) {
  require_unit(s, "simulate_protocol: s");
  require_unit(t, "simulate_protocol: t");
  if (n == 0) throw std::invalid_argument("simulate_protocol: n must be >= 1");

  std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
  const CouplingKind kind = spec.kind();

  // Closed tables for the kinds that are *defined* by their joint table.
  JointTable table{};
  if (kind == CouplingKind::IID || kind == CouplingKind::MaxEntropy) {
    table = joint_table(spec, s, t);
  }
  const double as = (kind == CouplingKind::CondIIDThreshold) ? a_opt(s) : 0.0;
  const double at = (kind == CouplingKind::CondIIDThreshold) ? a_opt(t) : 0.0;
  const double fs = spec.correction(1.0 - s);
  const double ft = spec.correction(1.0 - t);

  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t base = 5 * i;
    const double u0 = stream_uniform(seed, base);  // shared randomness
    int x = 0, y = 0;
    switch (kind) {
      case CouplingKind::IID:
      case CouplingKind::MaxEntropy: {
        // Inverse CDF on the cells in the order (0,0),(0,1),(1,0),(1,1).
        if (u0 < table.p00) {
          x = 0; y = 0;
        } else if (u0 < table.p00 + table.p01) {
          x = 0; y = 1;
        } else if (u0 < table.p00 + table.p01 + table.p10) {
          x = 1; y = 0;
        } else {
          x = 1; y = 1;
        }
        break;
      }
      case CouplingKind::CondIIDThreshold: {
        // Per coordinate: with probability a(.) use the shared threshold
        // draw, otherwise an independent local draw.
        const bool share_x = stream_uniform(seed, base + 1) < as;
        const bool share_y = stream_uniform(seed, base + 2) < at;
        x = (share_x ? u0 : stream_uniform(seed, base + 3)) < s ? 1 : 0;
        y = (share_y ? u0 : stream_uniform(seed, base + 4)) < t ? 1 : 0;
        break;
      }
      case CouplingKind::CondIIDProduct: {
        // Shared sign flip: P(X=0) = (1-s) + sign * f(1-s), jointly for
        // both coordinates, which yields Pi(0,0) = (1-s)(1-t) + f f.
        const double sign = (u0 < 0.5) ? -1.0 : 1.0;
        const double px0 = (1.0 - s) + sign * fs;
        const double py0 = (1.0 - t) + sign * ft;
        x = (stream_uniform(seed, base + 1) < px0) ? 0 : 1;
        y = (stream_uniform(seed, base + 2) < py0) ? 0 : 1;
        break;
      }
    }
    ++counts[x][y];
  }

  SimulationResult result;
  result.n = n;
  const double dn = static_cast<double>(n);
  result.empirical.p00 = counts[0][0] / dn;
  result.empirical.p01 = counts[0][1] / dn;
  result.empirical.p10 = counts[1][0] / dn;
  result.empirical.p11 = counts[1][1] / dn;
  return result;
}

double sawin_objective(double a, double b, double alpha) {
  if (!(a >= 0.0 && a <= 0.5)) {
    throw std::domain_error("sawin_objective: a = " + std::to_string(a) +
                            " outside [0, 1/2]");
  }
  if (!(b > 0.0 && b < 1.0)) {
    throw std::domain_error("sawin_objective: b = " + std::to_string(b) +
                            " outside (0,1)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("sawin_objective: alpha = " +
                            std::to_string(alpha) + " outside [0,1]");
  }
  const double abar = 1.0 - a, bbar = 1.0 - b;
  const double iid_term = abar * abar * binary_entropy(bbar * bbar);
  const double maxent_term =
      2.0 * a * binary_entropy(max_entropy_overlap(1.0, b)) +
      (1.0 - 2.0 * a) * binary_entropy(max_entropy_overlap(b, b));
  return (1.0 - alpha) * iid_term + alpha * maxent_term -
         abar * binary_entropy(b);
}

}  // namespace uccert
