#include "uccert/maxcorr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "uccert/constants.hpp"
#include "uccert/entropy.hpp"
#include "uccert/report.hpp"

namespace uccert {

namespace {

double gap_at(double rho, double a, double b) {
  const double ab = 1.0 - a;
  const double bb = 1.0 - b;
  const double mass = std::max(ab * ab - a * ab * rho, 1.0 - 2.0 * ab);
  const double arg = std::min(bb * bb + b * bb * rho, 0.5);
  return mass * binary_entropy(arg) - ab * binary_entropy(b);
}

}  // namespace

double maxcorr_gap(double rho, double a, double b) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::domain_error("maxcorr_gap: rho outside [0,1]");
  }
  return gap_at(rho, a, b);
}

double maxcorr_gap(double rho) {
  const ConstantsTable& c = constants();
  return maxcorr_gap(rho, c.a_star, c.b_star);
}

MaxCorrScan scan_negativity(int n_points) {
  if (n_points < 3) {
    throw std::invalid_argument("scan_negativity: need at least 3 points");
  }
  const ConstantsTable& c = constants();
  const double a = c.a_star;
  const double b = c.b_star;
  const double ab = 1.0 - a;
  const double bb = 1.0 - b;

  MaxCorrScan scan;
  scan.rho_grid.reserve(n_points);
  scan.lhs_values.reserve(n_points);

  double max_lhs = -std::numeric_limits<double>::infinity();
  auto consider = [&](double rho) {
    const double v = gap_at(rho, a, b);
    max_lhs = std::max(max_lhs, v);
    return v;
  };

  for (int i = 1; i <= n_points; ++i) {
    const double rho = static_cast<double>(i) / (n_points + 1);
    scan.rho_grid.push_back(rho);
    scan.lhs_values.push_back(consider(rho));
  }

  // Branch switches: where the entropy argument hits 1/2 and where the mass
  // factor changes branch. Each is the root of a linear equation in rho.
  const double rho_entropy = (0.5 - bb * bb) / (b * bb);
  const double rho_mass = (ab * ab - (1.0 - 2.0 * ab)) / (a * ab);
  for (double rho : {rho_entropy, rho_mass}) {
    if (rho > 0.0 && rho < 1.0) scan.branch_switches.push_back(rho);
  }
  std::sort(scan.branch_switches.begin(), scan.branch_switches.end());

  // Refinement near 0: the gap vanishes at rho = 0, so the supremum over
  // the open interval is approached there; a geometric ladder below the
  // first grid point confirms the values stay negative on the way in.
  const double first = scan.rho_grid.front();
  for (double rho = 0.5 * first; rho > 1e-12; rho *= 0.5) consider(rho);

  // Refinement around each branch switch (one grid spacing wide).
  const double spacing = 1.0 / (n_points + 1);
  for (double center : scan.branch_switches) {
    for (int k = -50; k <= 50; ++k) {
      const double rho = center + k * spacing / 50.0;
      if (rho > 0.0 && rho < 1.0) consider(rho);
    }
  }

  scan.max_lhs_on_open_interval = max_lhs;
  const double delta = 1e-7;
  scan.derivative_at_zero_plus =
      (gap_at(delta, a, b) - gap_at(0.0, a, b)) / delta;
  scan.pass = max_lhs < 0.0;
  return scan;
}

nlohmann::ordered_json MaxCorrScan::to_json() const {
  nlohmann::ordered_json j;
  j["n_grid_points"] = rho_grid.size();
  j["max_lhs_on_open_interval"] = max_lhs_on_open_interval;
  j["derivative_at_zero_plus"] = derivative_at_zero_plus;
  j["branch_switches"] = branch_switches;
  j["pass"] = pass;
  return j;
}

void write_scan_csv(const MaxCorrScan& scan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "rho,lhs\n";
  for (std::size_t i = 0; i < scan.rho_grid.size(); ++i) {
    out << fmt17(scan.rho_grid[i]) << ',' << fmt17(scan.lhs_values[i]) << '\n';
  }
}

}  // namespace uccert
