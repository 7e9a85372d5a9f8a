#include "uccert/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Dense>

#include "uccert/constants.hpp"
#include "uccert/entropy.hpp"
#include "uccert/report.hpp"
#include "uccert/rng.hpp"

namespace uccert {

namespace {

constexpr double kCertifyTol = 1e-6;   // certified iff min_ratio >= 1 - this
constexpr double kStatTol = 1e-8;      // projected KKT residual
constexpr double kViolTol = 1e-9;      // feasibility at convergence
constexpr double kStructTol = 1e-3;    // structure-match resolution

using Vec9 = std::array<double, 9>;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

/// h'(u) with the singular endpoints clamped to +-60 (= log2 of 1e18); the
/// true slope at an atom hitting {0,1} is infinite, and the box projection
/// in the KKT residual treats any large outward slope identically.
double hp(double u) {
  const double uc = std::min(1.0 - 1e-18, std::max(1e-18, u));
  return std::log2((1.0 - uc) / uc);
}

double h(double u) { return binary_entropy(u); }

/// Product kernel K(x,y) = xy(1 + (1-x)(1-y)) and its x-derivative.
double kker(double x, double y) {
  return x * y * (1.0 + (1.0 - x) * (1.0 - y));
}

double kker_dx(double x, double y) {
  return y * (1.0 + (1.0 - y) * (1.0 - 2.0 * x));
}

/// Unpacked evaluation state: six mixture atoms with their weights.
/// Atom order: P0 atoms (v3,v4,v5) then P1 atoms (v6,v7,v8); weights
/// (qbar*a1, qbar*a2, qbar*a3, q*a1, q*a2, q*a3).
struct Unpacked {
  double a[3];
  double q;
  double x[6];
  double w[6];
};

Unpacked unpack(const Vec9& v) {
  Unpacked u;
  u.a[0] = v[0];
  u.a[1] = v[1];
  u.a[2] = 1.0 - v[0] - v[1];
  u.q = v[2];
  for (int i = 0; i < 6; ++i) u.x[i] = v[3 + i];
  const double qb = 1.0 - u.q;
  for (int i = 0; i < 3; ++i) {
    u.w[i] = qb * u.a[i];
    u.w[3 + i] = u.q * u.a[i];
  }
  return u;
}

/// ratio = N / D with
///   N = (1-beta) sum_ij w_i w_j h(x_i x_j)
///       + beta [ (1-q) sum_ij a_i a_j h(K(b0_i, b0_j))
///              +   q   sum_ij a_i a_j h(K(b1_i, b1_j)) ]
///   D = sum_i w_i h(x_i).
/// Returns false when D is degenerate (all mass on {0,1}).
bool ratio_core(const Vec9& v, double beta, double* out) {
  const Unpacked u = unpack(v);
  double den = 0.0;
  for (int i = 0; i < 6; ++i) den += u.w[i] * h(u.x[i]);
  if (den < 1e-12) return false;

  double iid = 0.0;
  for (int i = 0; i < 6; ++i) {
    if (u.w[i] == 0.0) continue;
    for (int j = 0; j <= i; ++j) {
      const double term = u.w[i] * u.w[j] * h(u.x[i] * u.x[j]);
      iid += (i == j) ? term : 2.0 * term;
    }
  }
  double kq[2] = {0.0, 0.0};
  for (int comp = 0; comp < 2; ++comp) {
    const double* xs = u.x + 3 * comp;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double term = u.a[i] * u.a[j] * h(kker(xs[i], xs[j]));
        kq[comp] += (i == j) ? term : 2.0 * term;
      }
    }
  }
  const double num = (1.0 - beta) * iid +
                     beta * ((1.0 - u.q) * kq[0] + u.q * kq[1]);
  *out = num / den;
  return true;
}

double mean_core(const Vec9& v) {
  const Unpacked u = unpack(v);
  double r = 0.0;
  for (int i = 0; i < 6; ++i) r += u.w[i] * u.x[i];
  return r;
}

/// Analytic gradients of ratio and mean in the 9 packed coordinates.
/// Assumes a valid box point (possibly with a3 == 0).
struct Gradients {
  double ratio = 0.0;
  Vec9 ratio_grad{};
  double mean = 0.0;
  Vec9 mean_grad{};
  bool ok = false;
};

Gradients eval_gradients(const Vec9& v, double beta) {
  Gradients g;
  const Unpacked u = unpack(v);
  const double qb = 1.0 - u.q;

  double den = 0.0;
  for (int i = 0; i < 6; ++i) den += u.w[i] * h(u.x[i]);
  if (den < 1e-12) return g;

  // --- numerator pieces and their raw derivatives ---
  double iid = 0.0;
  double s_w[6] = {0};   // S_i = 2 sum_j w_j h(x_i x_j)  (d iid / d w_i)
  double iid_dx[6] = {0};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double prod = u.x[i] * u.x[j];
      iid += u.w[i] * u.w[j] * h(prod) * 0.5;  // halved; doubled below
      s_w[i] += 2.0 * u.w[j] * h(prod);
      iid_dx[i] += 2.0 * u.w[i] * u.w[j] * hp(prod) * u.x[j];
    }
  }
  iid *= 2.0;

  double kq[2] = {0.0, 0.0};
  double t_a[2][3] = {{0}};   // T_i = 2 sum_j a_j h(K) per component
  double kq_dx[6] = {0};
  for (int comp = 0; comp < 2; ++comp) {
    const double* xs = u.x + 3 * comp;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double kij = kker(xs[i], xs[j]);
        kq[comp] += u.a[i] * u.a[j] * h(kij);
        t_a[comp][i] += 2.0 * u.a[j] * h(kij);
        kq_dx[3 * comp + i] +=
            2.0 * u.a[i] * u.a[j] * hp(kij) * kker_dx(xs[i], xs[j]);
      }
    }
  }

  const double num = (1.0 - beta) * iid + beta * (qb * kq[0] + u.q * kq[1]);

  // --- assemble dN and dD in packed coordinates ---
  Vec9 dn{}, dd{};

  // a1, a2 (a3 = 1 - a1 - a2 rides along).
  for (int t = 0; t < 2; ++t) {
    double dn_iid = qb * (s_w[t] - s_w[2]) + u.q * (s_w[3 + t] - s_w[5]);
    double dn_k = qb * (t_a[0][t] - t_a[0][2]) + u.q * (t_a[1][t] - t_a[1][2]);
    dn[t] = (1.0 - beta) * dn_iid + beta * dn_k;
    dd[t] = qb * (h(u.x[t]) - h(u.x[2])) + u.q * (h(u.x[3 + t]) - h(u.x[5]));
  }
  // q: dw/dq = (-a, +a).
  {
    double dn_iid = 0.0, dd_q = 0.0;
    for (int i = 0; i < 3; ++i) {
      dn_iid += u.a[i] * (s_w[3 + i] - s_w[i]);
      dd_q += u.a[i] * (h(u.x[3 + i]) - h(u.x[i]));
    }
    dn[2] = (1.0 - beta) * dn_iid + beta * (kq[1] - kq[0]);
    dd[2] = dd_q;
  }
  // atom coordinates.
  for (int k = 0; k < 6; ++k) {
    dn[3 + k] = (1.0 - beta) * iid_dx[k] +
                beta * ((k < 3 ? qb : u.q) * kq_dx[k]);
    dd[3 + k] = u.w[k] * hp(u.x[k]);
  }

  g.ratio = num / den;
  for (int i = 0; i < 9; ++i) {
    g.ratio_grad[i] = (dn[i] - g.ratio * dd[i]) / den;
  }

  g.mean = 0.0;
  for (int i = 0; i < 6; ++i) g.mean += u.w[i] * u.x[i];
  for (int t = 0; t < 2; ++t) {
    g.mean_grad[t] = qb * (u.x[t] - u.x[2]) + u.q * (u.x[3 + t] - u.x[5]);
  }
  {
    double dq = 0.0;
    for (int i = 0; i < 3; ++i) dq += u.a[i] * (u.x[3 + i] - u.x[i]);
    g.mean_grad[2] = dq;
  }
  for (int k = 0; k < 6; ++k) g.mean_grad[3 + k] = u.w[k];

  g.ok = true;
  return g;
}

// --- penalized evaluation for the global (derivative-free) phase ---

struct PenaltyContext {
  double beta = 0.0;
  double c = 0.0;
  double rho = 0.0;
};

/// Clamp into the box and scale (a1,a2) onto the simplex; returns the
/// pre-repair violation magnitudes through the pointers.
Vec9 repair(const Vec9& raw, double* box_viol2, double* simplex_viol) {
  Vec9 th;
  double bv2 = 0.0;
  for (int i = 0; i < 9; ++i) {
    th[i] = clamp01(raw[i]);
    const double d = raw[i] - th[i];
    bv2 += d * d;
  }
  const double s = th[0] + th[1];
  *simplex_viol = std::max(0.0, s - 1.0);
  if (s > 1.0) {
    th[0] /= s;
    th[1] /= s;
  }
  *box_viol2 = bv2;
  return th;
}

double penalized(const Vec9& raw, const PenaltyContext& ctx) {
  double bv2 = 0.0, sv = 0.0;
  const Vec9 th = repair(raw, &bv2, &sv);
  double r = 0.0;
  if (!ratio_core(th, ctx.beta, &r)) r = 10.0;  // degenerate denominator
  const double mv = std::max(0.0, (1.0 - ctx.c) - mean_core(th));
  return r + ctx.rho * (mv * mv + sv * sv + bv2);
}

// --- Nelder-Mead (adaptive parameters) ---

struct NmOutcome {
  Vec9 x;
  double f = 0.0;
};

NmOutcome nelder_mead(const std::function<double(const Vec9&)>& f,
                      const Vec9& x0, double step, int max_iter) {
  constexpr int n = 9;
  const double alpha = 1.0;
  const double beta_e = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  std::array<Vec9, n + 1> xs;
  std::array<double, n + 1> fs;
  xs[0] = x0;
  fs[0] = f(x0);
  for (int i = 0; i < n; ++i) {
    xs[i + 1] = x0;
    xs[i + 1][i] += step;
    fs[i + 1] = f(xs[i + 1]);
  }

  auto order = [&]() {
    std::array<int, n + 1> idx;
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    std::array<Vec9, n + 1> xs2;
    std::array<double, n + 1> fs2;
    for (int i = 0; i <= n; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs = xs2;
    fs = fs2;
  };

  order();
  for (int it = 0; it < max_iter; ++it) {
    // Convergence: simplex diameter and value spread both tiny.
    double diam = 0.0;
    for (int i = 1; i <= n; ++i) {
      for (int k = 0; k < n; ++k) {
        diam = std::max(diam, std::abs(xs[i][k] - xs[0][k]));
      }
    }
    if (diam < 1e-10 && std::abs(fs[n] - fs[0]) < 1e-13 * (1.0 + std::abs(fs[0]))) {
      break;
    }

    Vec9 centroid{};
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) centroid[k] += xs[i][k] / n;
    }
    auto blendpt = [&](double t) {
      Vec9 p;
      for (int k = 0; k < n; ++k) p[k] = centroid[k] + t * (xs[n][k] - centroid[k]);
      return p;
    };

    const Vec9 xr = blendpt(-alpha);
    const double fr = f(xr);
    if (fr < fs[0]) {
      const Vec9 xe = blendpt(-alpha * beta_e);
      const double fe = f(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      const bool outside = fr < fs[n];
      const Vec9 xc = blendpt(outside ? -alpha * gamma : gamma);
      const double fc = f(xc);
      if (fc < std::min(fr, fs[n])) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < n; ++k) {
            xs[i][k] = xs[0][k] + delta * (xs[i][k] - xs[0][k]);
          }
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  return {xs[0], fs[0]};
}

// --- projected gradient (analytic) on the penalized function ---

Vec9 project_box_simplex(Vec9 th) {
  for (int i = 0; i < 9; ++i) th[i] = clamp01(th[i]);
  const double s = th[0] + th[1];
  if (s > 1.0) {
    // Euclidean projection onto {a1 + a2 <= 1} within the box.
    const double excess = 0.5 * (s - 1.0);
    th[0] = clamp01(th[0] - excess);
    th[1] = clamp01(th[1] - excess);
    const double s2 = th[0] + th[1];
    if (s2 > 1.0) {  // corner case after clamping
      th[0] /= s2;
      th[1] /= s2;
    }
  }
  return th;
}

Vec9 pg_minimize(const PenaltyContext& ctx, Vec9 th, int max_iter) {
  auto fval = [&](const Vec9& p) {
    double r = 0.0;
    if (!ratio_core(p, ctx.beta, &r)) r = 10.0;
    const double mv = std::max(0.0, (1.0 - ctx.c) - mean_core(p));
    return r + ctx.rho * mv * mv;
  };
  double f = fval(th);
  double t = 1e-2;
  for (int it = 0; it < max_iter; ++it) {
    const Gradients g = eval_gradients(th, ctx.beta);
    Vec9 grad{};
    if (g.ok) {
      const double mv = std::max(0.0, (1.0 - ctx.c) - g.mean);
      for (int i = 0; i < 9; ++i) {
        grad[i] = g.ratio_grad[i] - 2.0 * ctx.rho * mv * g.mean_grad[i];
      }
    } else {
      // Degenerate point (all mass on {0,1}): nudge the atoms inward to
      // restore a usable denominator.
      for (int i = 3; i < 9; ++i) grad[i] = (th[i] > 0.5) ? 1.0 : -1.0;
    }
    t = std::min(t * 4.0, 1.0);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec9 trial;
      for (int i = 0; i < 9; ++i) trial[i] = th[i] - t * grad[i];
      trial = project_box_simplex(trial);
      const double ft = fval(trial);
      double step2 = 0.0;
      for (int i = 0; i < 9; ++i) {
        const double d = trial[i] - th[i];
        step2 += d * d;
      }
      if (ft <= f - 1e-4 * step2 / std::max(t, 1e-300)) {
        th = trial;
        f = ft;
        moved = step2 > 0.0;
        break;
      }
      t *= 0.5;
    }
    if (!moved && t < 1e-14) break;
  }
  return th;
}

// --- SQP-style polish with analytic gradients ---
//
// Active-set sequential quadratic programming on
//   minimize ratio(theta)  s.t.  mean >= 1-c, a1+a2 <= 1, theta in [0,1]^9.
// The Hessian of the Lagrangian is taken by central differences of the
// analytic gradient on the free coordinates; box-active coordinates are
// frozen, functional constraints enter through a KKT system. Convergence
// is declared on the projected KKT residual and primal feasibility.

struct PolishResult {
  Vec9 theta;
  double ratio = 0.0;
  double kkt = 0.0;
  double violation = 0.0;
  bool converged = false;
  bool degenerate = false;
};

PolishResult sqp_polish(Vec9 th, double beta, double c, int max_iter) {
  PolishResult res;
  th = project_box_simplex(th);

  double lambda_mean = 0.0;    // multiplier for mean >= 1-c
  double lambda_simplex = 0.0; // multiplier for a1 + a2 <= 1

  auto feas_viol = [&](const Vec9& p) {
    const double mv = std::max(0.0, (1.0 - c) - mean_core(p));
    const double sv = std::max(0.0, p[0] + p[1] - 1.0);
    return std::max(mv, sv);
  };
  auto merit = [&](const Vec9& p, double weight) {
    double r = 0.0;
    if (!ratio_core(p, beta, &r)) r = 10.0;
    return r + weight * feas_viol(p);
  };

  for (int it = 0; it < max_iter; ++it) {
    const Gradients g = eval_gradients(th, beta);
    if (!g.ok) {
      res.degenerate = true;
      break;
    }

    const bool mean_active = (g.mean - (1.0 - c) < 1e-7) || lambda_mean > 0.0;
    const bool simplex_active =
        (th[0] + th[1] > 1.0 - 1e-9) || lambda_simplex > 0.0;

    // Box-active coordinates: at a bound with the Lagrangian gradient
    // pointing outward stay frozen.
    Vec9 lgrad;
    for (int i = 0; i < 9; ++i) {
      lgrad[i] = g.ratio_grad[i] - lambda_mean * g.mean_grad[i];
    }
    lgrad[0] += lambda_simplex;
    lgrad[1] += lambda_simplex;

    std::vector<int> free;
    for (int i = 0; i < 9; ++i) {
      const bool at_lo = th[i] <= 1e-12 && lgrad[i] > 0.0;
      const bool at_hi = th[i] >= 1.0 - 1e-12 && lgrad[i] < 0.0;
      if (!at_lo && !at_hi) free.push_back(i);
    }

    // KKT residual: projected Lagrangian gradient + feasibility.
    double kkt = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double moved = th[i] - clamp01(th[i] - lgrad[i]);
      kkt += moved * moved;
    }
    kkt = std::sqrt(kkt);
    const double viol = feas_viol(th);
    // Complementarity: an active multiplier with slack counts against us.
    if (lambda_mean > 0.0) {
      kkt = std::max(kkt, lambda_mean * std::max(0.0, g.mean - (1.0 - c)));
    }
    if (lambda_simplex > 0.0) {
      kkt = std::max(kkt, lambda_simplex * std::max(0.0, 1.0 - th[0] - th[1]));
    }

    res.theta = th;
    res.ratio = g.ratio;
    res.kkt = kkt;
    res.violation = viol;
    // Internally polish feasibility well past the reported 1e-9 contract:
    // a converged point with slack s sits lambda*s below the constrained
    // minimum, so one extra Newton restoration (quadratic in s) keeps the
    // certified minimum clean at ~1e-12.
    if (kkt <= kStatTol && viol <= 1e-12) {
      res.converged = true;
      return res;
    }

    const int nf = static_cast<int>(free.size());
    if (nf == 0) break;

    // Lagrangian Hessian on free coordinates by central differences of the
    // analytic gradient.
    Eigen::MatrixXd hess(nf, nf);
    const double hstep = 1e-5;
    for (int k = 0; k < nf; ++k) {
      // Difference points stay inside the box (one-sided at a bound).
      const double hi = std::min(1.0, th[free[k]] + hstep);
      const double lo = std::max(0.0, th[free[k]] - hstep);
      Vec9 tp = th, tm = th;
      tp[free[k]] = hi;
      tm[free[k]] = lo;
      const Gradients gp = eval_gradients(tp, beta);
      const Gradients gm = eval_gradients(tm, beta);
      if (!gp.ok || !gm.ok) {
        hess.setIdentity();
        break;
      }
      for (int l = 0; l < nf; ++l) {
        const double d =
            (gp.ratio_grad[free[l]] - lambda_mean * gp.mean_grad[free[l]]) -
            (gm.ratio_grad[free[l]] - lambda_mean * gm.mean_grad[free[l]]);
        hess(l, k) = d / (hi - lo);
      }
    }
    hess = 0.5 * (hess + hess.transpose().eval());

    // Regularized KKT solve; escalate tau until the step is usable.
    Eigen::VectorXd gf(nf);
    for (int k = 0; k < nf; ++k) gf(k) = lgrad[free[k]];

    // One KKT attempt on a working subset of the free coordinates (given
    // as positions into `free`); returns the step on that subset plus the
    // constraint multipliers, or nothing if the system is singular.
    struct Attempt {
      Eigen::VectorXd d;
      bool has_mean_row = false, has_simplex_row = false;
      double nu_mean = 0.0, nu_simplex = 0.0;
    };
    auto attempt = [&](double tau,
                       const std::vector<int>& pos) -> std::optional<Attempt> {
      const int np = static_cast<int>(pos.size());
      if (np == 0) return std::nullopt;
      Attempt at;
      std::vector<Eigen::VectorXd> arows;
      std::vector<double> arhs;
      if (mean_active) {
        Eigen::VectorXd row(np);
        for (int k = 0; k < np; ++k) row(k) = g.mean_grad[free[pos[k]]];
        if (row.lpNorm<Eigen::Infinity>() > 1e-14) {
          arows.push_back(row);
          arhs.push_back((1.0 - c) - g.mean);
          at.has_mean_row = true;
        }
      }
      if (simplex_active) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(np);
        for (int k = 0; k < np; ++k) {
          if (free[pos[k]] == 0 || free[pos[k]] == 1) row(k) = -1.0;
        }
        if (row.lpNorm<Eigen::Infinity>() > 0.0) {
          arows.push_back(row);
          arhs.push_back(th[0] + th[1] - 1.0);
          at.has_simplex_row = true;
        }
      }
      const int ma = static_cast<int>(arows.size());
      Eigen::MatrixXd kktm = Eigen::MatrixXd::Zero(np + ma, np + ma);
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) kktm(i, j) = hess(pos[i], pos[j]);
        kktm(i, i) += tau;
      }
      for (int r = 0; r < ma; ++r) {
        kktm.block(np + r, 0, 1, np) = arows[r].transpose();
        kktm.block(0, np + r, np, 1) = arows[r];
      }
      Eigen::VectorXd rhsv(np + ma);
      for (int k = 0; k < np; ++k) rhsv(k) = -gf(pos[k]);
      for (int r = 0; r < ma; ++r) rhsv(np + r) = arhs[r];
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kktm);
      if (!lu.isInvertible()) return std::nullopt;
      const Eigen::VectorXd sol = lu.solve(rhsv);
      at.d = sol.head(np);
      int r = 0;
      if (at.has_mean_row) at.nu_mean = sol(np + r++);
      if (at.has_simplex_row) at.nu_simplex = sol(np + r++);
      return at;
    };

    bool stepped = false;
    for (double tau = 1e-10; tau <= 1e6 && !stepped; tau *= 100.0) {
      // Active-set refinement: when the step pushes a free-at-bound
      // coordinate outward, freeze it and re-solve, so the projection never
      // silently truncates the direction to a zero step.
      std::vector<int> pos(nf);
      for (int k = 0; k < nf; ++k) pos[k] = k;
      std::optional<Attempt> at;
      for (int pass = 0; pass < 10; ++pass) {
        at = attempt(tau, pos);
        if (!at) break;
        std::vector<int> kept;
        for (int k = 0; k < static_cast<int>(pos.size()); ++k) {
          const int i = free[pos[k]];
          const bool out_lo = th[i] <= 1e-12 && at->d(k) < -1e-16;
          const bool out_hi = th[i] >= 1.0 - 1e-12 && at->d(k) > 1e-16;
          if (!out_lo && !out_hi) kept.push_back(pos[k]);
        }
        if (kept.size() == pos.size()) break;
        pos = std::move(kept);
        at.reset();
      }
      if (!at) continue;

      // Multiplier update. The KKT row reads H d + g + A^T nu = 0 with
      // g = grad(ratio) - lambda*grad(mean) + mu*(e0+e1), mean row +grad(mean)
      // and simplex row -(e0+e1), so the updated full-problem multipliers are
      // lambda - nu_mean and mu - nu_simplex.
      double new_lambda = lambda_mean, new_mu = lambda_simplex;
      if (at->has_mean_row) new_lambda = lambda_mean - at->nu_mean;
      if (at->has_simplex_row) new_mu = lambda_simplex - at->nu_simplex;

      // Backtracking on the exact-penalty merit. Only genuine decrease is
      // accepted, with one exception: the untruncated Newton step may leave
      // the merit unchanged to rounding when already at the solution (the
      // step then only refines multipliers). Accepting near-zero backtracked
      // steps here would freeze the iteration at saddle points where the
      // escalation to a larger (more gradient-like) tau is what escapes.
      const double mw = 10.0 * (std::abs(new_lambda) + std::abs(new_mu) + 1.0);
      const double m0 = merit(th, mw);
      double t = 1.0;
      for (int ls = 0; ls < 30; ++ls) {
        Vec9 trial = th;
        for (int k = 0; k < static_cast<int>(pos.size()); ++k) {
          trial[free[pos[k]]] = th[free[pos[k]]] + t * at->d(k);
        }
        trial = project_box_simplex(trial);
        const double mt = merit(trial, mw);
        const bool accept =
            mt <= m0 - 1e-15 ||
            (ls == 0 && mt <= m0 + 1e-14 * (1.0 + std::abs(m0)));
        if (accept) {
          th = trial;
          lambda_mean = mean_active ? std::max(0.0, new_lambda) : 0.0;
          lambda_simplex = simplex_active ? std::max(0.0, new_mu) : 0.0;
          stepped = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!stepped) break;  // no usable step; report the residual we have
  }

  // Final bookkeeping when the loop fell through without converging.
  const Gradients g = eval_gradients(th, beta);
  if (g.ok) {
    Vec9 lgrad;
    for (int i = 0; i < 9; ++i) {
      lgrad[i] = g.ratio_grad[i] - lambda_mean * g.mean_grad[i];
    }
    lgrad[0] += lambda_simplex;
    lgrad[1] += lambda_simplex;
    double kkt = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double moved = th[i] - clamp01(th[i] - lgrad[i]);
      kkt += moved * moved;
    }
    res.theta = th;
    res.ratio = g.ratio;
    res.kkt = std::sqrt(kkt);
    res.violation = feas_viol(th);
    res.converged = res.kkt <= kStatTol && res.violation <= kViolTol;
  }
  return res;
}

/// Exact removal of the parametrization's continuous null directions before
/// a Newton polish: a mixture weight within 1e-6 of {0,1} is snapped to the
/// bound (the mirror component's coordinates then carry exactly zero weight
/// instead of a ~1e-11 ghost gradient), the live component is oriented into
/// P0 and mirrored into P1, and coincident atoms of the live component are
/// merged so the weight split between them stops being a flat direction.
/// Every edit moves the point by at most ~1e-6 inside the same basin; the
/// polish that follows re-optimizes, so no accuracy is lost.
Vec9 canonicalize(Vec9 th) {
  auto components_close = [&](double tol) {
    const double a[3] = {th[0], th[1], 1.0 - th[0] - th[1]};
    for (int i = 0; i < 3; ++i) {
      // Only atoms carrying weight distinguish the components.
      if (a[i] > 1e-6 && std::abs(th[3 + i] - th[6 + i]) > tol) return false;
    }
    return true;
  };
  if (th[2] >= 1.0 - 1e-5) {
    std::swap(th[3], th[6]);
    std::swap(th[4], th[7]);
    std::swap(th[5], th[8]);
    th[2] = 0.0;
  } else if (th[2] <= 1e-5 || components_close(1e-4)) {
    th[2] = 0.0;
  }
  // Dust weights collapse to an exact corner of the simplex (a zeroed a1/a2
  // hands its mass to a3 implicitly; zeroing a3 grows the larger of a1/a2).
  if (th[0] > 0.0 && th[0] <= 1e-5) th[0] = 0.0;
  if (th[1] > 0.0 && th[1] <= 1e-5) th[1] = 0.0;
  {
    const double a3 = 1.0 - th[0] - th[1];
    if (a3 > 0.0 && a3 <= 1e-5) {
      if (th[0] >= th[1]) {
        th[0] = clamp01(1.0 - th[1]);
      } else {
        th[1] = clamp01(1.0 - th[0]);
      }
    }
  }
  // Atoms snap onto an adjacent bound; a polish can always pull a snapped
  // atom back inside, but a near-bound fossil with a vanishing weight
  // cannot crawl to its bound on its own.
  for (int k = 3; k < 9; ++k) {
    if (th[k] <= 1e-5) {
      th[k] = 0.0;
    } else if (th[k] >= 1.0 - 1e-5) {
      th[k] = 1.0;
    }
  }
  if (th[2] == 0.0) {
    // Merge coincident live atoms: move the later atom's weight into the
    // earlier one. Weights are (a1, a2, a3 = 1 - a1 - a2). The landscape's
    // minimizers keep distinct atoms far apart (0 vs ~0.69), so a 1e-4
    // window only collapses genuine duplicates.
    if (std::abs(th[3] - th[4]) <= 1e-4 && th[1] > 0.0) {
      th[0] = std::min(1.0, th[0] + th[1]);  // a1 += a2
      th[1] = 0.0;
    }
    if (std::abs(th[3] - th[5]) <= 1e-4) {
      th[0] = clamp01(1.0 - th[1]);  // a1 += a3, i.e. a3 = 0
    } else if (std::abs(th[4] - th[5]) <= 1e-4 && 1.0 - th[0] - th[1] > 0.0) {
      th[1] = clamp01(1.0 - th[0]);  // a2 += a3
    }
    // Dead mirror component: copy the live atoms so the two components are
    // identical (inert for the objective, canonical for reporting).
    th[6] = th[3];
    th[7] = th[4];
    th[8] = th[5];
  }
  return project_box_simplex(th);
}

// --- effective-measure helpers for structure reporting ---

struct EffectiveMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
};

EffectiveMeasure merge_support(const std::vector<double>& atoms,
                               const std::vector<double>& weights,
                               double merge_tol, double drop_tol) {
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] > 0.0) pairs.emplace_back(atoms[i], weights[i]);
  }
  std::sort(pairs.begin(), pairs.end());
  EffectiveMeasure m;
  for (const auto& [x, w] : pairs) {
    if (!m.atoms.empty() && x - m.atoms.back() < merge_tol) {
      const double ws = m.weights.back() + w;
      m.atoms.back() = (m.atoms.back() * m.weights.back() + x * w) / ws;
      m.weights.back() = ws;
    } else {
      m.atoms.push_back(x);
      m.weights.push_back(w);
    }
  }
  // Drop dust, then renormalize.
  EffectiveMeasure out;
  double total = 0.0;
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    if (m.weights[i] >= drop_tol) {
      out.atoms.push_back(m.atoms[i]);
      out.weights.push_back(m.weights[i]);
      total += m.weights[i];
    }
  }
  if (total > 0.0) {
    for (double& w : out.weights) w /= total;
  }
  return out;
}

EffectiveMeasure effective_blend(const ThetaVector& th) {
  const Unpacked u = unpack(th.v);
  std::vector<double> atoms(u.x, u.x + 6);
  std::vector<double> weights(u.w, u.w + 6);
  return merge_support(atoms, weights, kStructTol, 5e-4);
}

StructureMatch analyze_structure(const ThetaVector& th) {
  StructureMatch sm;
  const double q = th.q();
  sm.q_distance = std::min(q, 1.0 - q);

  const Unpacked u = unpack(th.v);
  const EffectiveMeasure c0 = merge_support({u.x[0], u.x[1], u.x[2]},
                                            {u.a[0], u.a[1], u.a[2]},
                                            kStructTol, 5e-4);
  const EffectiveMeasure c1 = merge_support({u.x[3], u.x[4], u.x[5]},
                                            {u.a[0], u.a[1], u.a[2]},
                                            kStructTol, 5e-4);
  bool components_equal = c0.atoms.size() == c1.atoms.size();
  if (components_equal) {
    for (std::size_t i = 0; i < c0.atoms.size(); ++i) {
      if (std::abs(c0.atoms[i] - c1.atoms[i]) > kStructTol ||
          std::abs(c0.weights[i] - c1.weights[i]) > kStructTol) {
        components_equal = false;
        break;
      }
    }
  }
  sm.is_degenerate_mixture = sm.q_distance <= kStructTol || components_equal;

  const EffectiveMeasure eff = (q <= kStructTol)         ? c0
                               : (q >= 1.0 - kStructTol) ? c1
                                                         : effective_blend(th);

  const double xs = constants().x_star;
  const double ps = constants().p_star;
  sm.atom_distances.clear();
  double w_top = 0.0;
  bool has_zero = false, has_xstar = false;
  for (std::size_t i = 0; i < eff.atoms.size(); ++i) {
    const double x = eff.atoms[i];
    const double d0 = std::abs(x - 0.0);
    const double dx = std::abs(x - xs);
    sm.atom_distances.push_back(std::min(d0, dx));
    if (d0 <= kStructTol) has_zero = true;
    if (dx <= kStructTol) {
      has_xstar = true;
      w_top = eff.weights[i];
    }
  }
  sm.weight_error = std::abs(w_top - ps);
  sm.matches_conjecture = sm.is_degenerate_mixture && eff.atoms.size() == 2 &&
                          has_zero && has_xstar &&
                          sm.weight_error <= kStructTol;
  return sm;
}

Vec9 random_start(std::uint64_t seed) {
  // (a1, a2, a3) uniform on the simplex via sorted uniforms; the rest of
  // the coordinates uniform on [0,1].
  const double u1 = stream_uniform(seed, 0);
  const double u2 = stream_uniform(seed, 1);
  const double lo = std::min(u1, u2), hi = std::max(u1, u2);
  Vec9 th;
  th[0] = lo;
  th[1] = hi - lo;
  th[2] = stream_uniform(seed, 2);
  for (int i = 3; i < 9; ++i) th[i] = stream_uniform(seed, i);
  return th;
}

}  // namespace

bool ThetaVector::valid(double tol) const {
  for (double x : v) {
    if (!(x >= -tol && x <= 1.0 + tol)) return false;
  }
  return v[0] + v[1] <= 1.0 + tol;
}

MixturePair ThetaVector::to_mixture() const {
  const double a3v = a3();
  std::vector<double> w = {v[0], v[1], std::max(0.0, a3v)};
  DiscreteMeasure p0({v[3], v[4], v[5]}, w);
  DiscreteMeasure p1({v[6], v[7], v[8]}, w);
  return MixturePair(v[2], std::move(p0), std::move(p1));
}

nlohmann::ordered_json ThetaVector::to_json() const {
  return {{"a1", v[0]}, {"a2", v[1]}, {"a3", a3()},   {"q", v[2]},
          {"b0", v[3]}, {"b2", v[4]}, {"b4", v[5]},
          {"b1", v[6]}, {"b3", v[7]}, {"b5", v[8]}};
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::NelderMead ? "nm" : "pg";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "nm" || name == "nelder-mead") return SolverKind::NelderMead;
  if (name == "pg" || name == "projected-gradient") {
    return SolverKind::ProjectedGradient;
  }
  throw std::invalid_argument("unknown solver kind: " + name);
}

void CertificationConfig::validate() const {
  if (!(c > 0.0 && c < 0.5)) {
    throw std::invalid_argument("CertificationConfig: c outside (0, 0.5)");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("CertificationConfig: beta outside [0,1]");
  }
  if (n_starts < 1) {
    throw std::invalid_argument("CertificationConfig: n_starts < 1");
  }
  if (threads < 0) {
    throw std::invalid_argument("CertificationConfig: negative thread count");
  }
}

double objective(const ThetaVector& theta, double beta) {
  if (!theta.valid()) {
    throw std::domain_error("objective: theta violates the box/simplex bounds");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::domain_error("objective: beta outside [0,1]");
  }
  double r = 0.0;
  if (!ratio_core(theta.v, beta, &r)) {
    throw std::domain_error(
        "objective: degenerate input, E[h] = 0 (all mass on {0,1})");
  }
  return r;
}

double mean_constraint(const ThetaVector& theta) {
  if (!theta.valid()) {
    throw std::domain_error(
        "mean_constraint: theta violates the box/simplex bounds");
  }
  return mean_core(theta.v);
}

LocalResult local_solve(const ThetaVector& start,
                        const CertificationConfig& config) {
  config.validate();
  Vec9 th = project_box_simplex(start.v);

  if (config.solver == SolverKind::NelderMead) {
    for (const auto& [rho, step] :
         {std::pair{1e4, 0.15}, std::pair{1e6, 0.02}}) {
      const PenaltyContext ctx{config.beta, config.c, rho};
      const NmOutcome out =
          nelder_mead([&](const Vec9& p) { return penalized(p, ctx); }, th,
                      step, 2500);
      double bv2 = 0.0, sv = 0.0;
      th = repair(out.x, &bv2, &sv);
    }
  } else {
    const PenaltyContext ctx{config.beta, config.c, 1e6};
    th = pg_minimize(ctx, th, 1500);
  }

  // Polish rounds with null-direction removal in between: each polish
  // tightens the point enough for canonicalize() to identify the basin's
  // degenerate structure exactly, after which Newton converges
  // quadratically. A stalled round gets a short derivative-free burst to
  // hop off saddle plateaus before the next attempt.
  PolishResult pol;
  constexpr int kRounds = 6;
  for (int round = 0; round < kRounds; ++round) {
    th = canonicalize(th);
    pol = sqp_polish(th, config.beta, config.c, round == 0 ? 120 : 250);
    th = pol.theta;
    if (pol.converged) break;
    if (round < kRounds - 1) {
      const PenaltyContext ctx{config.beta, config.c, 1e8};
      const NmOutcome out =
          nelder_mead([&](const Vec9& p) { return penalized(p, ctx); }, th,
                      1e-3, 800);
      double bv2 = 0.0, sv = 0.0;
      th = repair(out.x, &bv2, &sv);
    }
  }

  LocalResult lr;
  lr.theta.v = pol.theta;
  lr.ratio = pol.ratio;
  lr.converged = pol.converged && !pol.degenerate;
  lr.stationarity = pol.kkt;
  lr.constraint_violation = pol.violation;
  return lr;
}

CertificationReport certify(const CertificationConfig& config) {
  config.validate();
  const int n = config.n_starts;

  std::vector<LocalResult> results(n);
  std::vector<std::uint64_t> seeds(n);
  for (int i = 0; i < n; ++i) seeds[i] = derive_seed(config.seed, i);

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int n_threads = config.threads > 0
                            ? config.threads
                            : static_cast<int>(std::min<unsigned>(hw, 16));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      ThetaVector th0;
      th0.v = random_start(seeds[i]);
      results[i] = local_solve(th0, config);
    }
  };
  if (n_threads <= 1 || n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CertificationReport report;
  report.config = config;
  report.starts.reserve(n);
  int best = -1;
  for (int i = 0; i < n; ++i) {
    const LocalResult& lr = results[i];
    report.starts.push_back({i, seeds[i], lr.converged, lr.ratio});
    if (!lr.converged) continue;
    ++report.n_converged;
    if (best < 0 || lr.ratio < results[best].ratio) best = i;
    ThetaVector th;
    th.v = lr.theta.v;
    if (effective_blend(th).atoms.size() == 1) ++report.n_one_point;
  }
  if (best < 0) {
    throw std::runtime_error("certify: no start converged");
  }
  report.min_ratio = results[best].ratio;
  report.argmin = results[best].theta;
  report.structure = analyze_structure(report.argmin);
  report.certified = report.min_ratio >= 1.0 - kCertifyTol;
  return report;
}

double family_ratio(double x, double beta, double c) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("family_ratio: x outside (0,1)");
  }
  const double p = (1.0 - c) / x;
  if (p > 1.0 + 1e-12) {
    throw std::domain_error("family_ratio: p = (1-c)/x exceeds 1");
  }
  const double xb = 1.0 - x;
  const double g = x * x * (1.0 + xb * xb);
  return p * ((1.0 - beta) * h(x * x) + beta * h(g)) / h(x);
}

ThetaVector conjectured_theta(double c, double beta) {
  if (!(c > 0.0 && c < 0.5)) {
    throw std::domain_error("conjectured_theta: c outside (0, 0.5)");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::domain_error("conjectured_theta: beta outside [0,1]");
  }
  double x, p;
  if (std::abs(c - constants().c_prime) <= 1e-12) {
    // At c' the family member with p = h(x)/h(x^2) is feasible with
    // equality; it makes the objective 1 for every beta simultaneously.
    x = constants().x_star;
    p = constants().p_star;
  } else {
    const double lo = 1.0 - c + 1e-12, hi = 1.0 - 1e-9;
    if (!(lo < hi)) {
      throw std::domain_error("conjectured_theta: empty feasible family");
    }
    // Coarse scan (the family objective can be multimodal), then golden
    // section on the best bracket.
    const int n_scan = 4000;
    double best_x = lo, best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_scan; ++i) {
      const double xi = lo + (hi - lo) * static_cast<double>(i) / n_scan;
      const double fi = family_ratio(xi, beta, c);
      if (fi < best_f) {
        best_f = fi;
        best_x = xi;
      }
    }
    double a = std::max(lo, best_x - (hi - lo) / n_scan);
    double b = std::min(hi, best_x + (hi - lo) / n_scan);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = family_ratio(x1, beta, c), f2 = family_ratio(x2, beta, c);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = family_ratio(x1, beta, c);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = family_ratio(x2, beta, c);
      }
    }
    x = 0.5 * (a + b);
    p = (1.0 - c) / x;
  }
  if (p > 1.0 + 1e-12) {
    throw std::domain_error("conjectured_theta: no feasible p <= 1");
  }
  p = std::min(p, 1.0);

  ThetaVector th;
  th.v = {1.0 - p, p, 0.0,   // a1 at 0, a2 at x, q = 0
          0.0, x, x,         // P0 atoms (a3 = 0 placeholder at x)
          0.0, x, x};        // P1 mirrors P0 (unused at q = 0)
  return th;
}

nlohmann::ordered_json StructureMatch_to_json(const StructureMatch& sm) {
  return {{"is_degenerate_mixture", sm.is_degenerate_mixture},
          {"atom_distances", sm.atom_distances},
          {"weight_error", sm.weight_error},
          {"q_distance", sm.q_distance},
          {"matches_conjecture", sm.matches_conjecture}};
}

nlohmann::ordered_json CertificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = {{"c", config.c},
                 {"beta", config.beta},
                 {"n_starts", config.n_starts},
                 {"seed", config.seed},
                 {"solver", to_string(config.solver)}};
  j["min_ratio"] = min_ratio;
  j["argmin"] = argmin.to_json();
  j["structure_match"] = StructureMatch_to_json(structure);
  j["n_converged"] = n_converged;
  j["n_one_point"] = n_one_point;
  j["certified"] = certified;
  nlohmann::ordered_json starts_json = nlohmann::ordered_json::array();
  for (const StartRecord& s : starts) {
    starts_json.push_back({{"index", s.index},
                           {"seed", s.seed},
                           {"converged", s.converged},
                           {"ratio", s.ratio}});
  }
  j["starts"] = std::move(starts_json);
  return j;
}

void write_trace_csv(const CertificationReport& report,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "start_index,converged,ratio\n";
  for (const StartRecord& s : report.starts) {
    out << s.index << ',' << (s.converged ? 1 : 0) << ',' << fmt17(s.ratio)
        << '\n';
  }
}

}  // namespace uccert
