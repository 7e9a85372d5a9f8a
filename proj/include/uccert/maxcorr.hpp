#pragma once

#include <vector>

#include <json.hpp>

// Maximal-correlation obstruction check. For the two-point extremizer
// (mass 1-a at b, mass a at 1) the correlation-constrained gap
//
//   gap(rho) = max{(1-a)^2 - a(1-a) rho, 1 - 2(1-a)}
//                * h(min{(1-b)^2 + b(1-b) rho, 1/2})
//              - (1-a) h(b)
//
// must stay negative for every rho in (0,1): no maximal-correlation
// constraint alone can break the extremizer, which is why the
// conditionally-i.i.d. coupling class is needed. gap(0) = 0 by the
// defining equations of (a, b) and gap decreases as rho leaves 0.

namespace uccert {

struct MaxCorrScan {
  std::vector<double> rho_grid;    // i/(n+1), i = 1..n (open interval)
  std::vector<double> lhs_values;  // gap at each grid point
  double max_lhs_on_open_interval = 0.0;  // grid max plus refinement windows
  double derivative_at_zero_plus = 0.0;   // one-sided difference at 0
  std::vector<double> branch_switches;    // rho where a max/min branch flips
  bool pass = false;                      // max < 0

  nlohmann::ordered_json to_json() const;
};

/// gap(rho) at the solved (a*, b*). Throws std::domain_error outside [0,1].
double maxcorr_gap(double rho);

/// gap(rho) at explicit (a, b).
double maxcorr_gap(double rho, double a, double b);

/// Evaluates the gap on {i/(n+1)} plus refinement windows near 0 and near
/// each branch switch. Requires n >= 3.
MaxCorrScan scan_negativity(int n_points);

/// CSV export of (rho, lhs) pairs at 17 significant digits.
void write_scan_csv(const MaxCorrScan& scan, const std::string& path);

}  // namespace uccert
