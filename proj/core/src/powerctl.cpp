#include "beamre/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamre/rates.hpp"

namespace beamre {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Interference floors seen by every UT under the candidate powers, with the
// (k,m) entry replaced by xbar: floor_k'(n) = gamma_tilde + sigma2 + cross.
double cross_sum(const ChannelStats& stats, const Surrogate& sur,
                 const PowerAllocation& x, int k, int m, double xbar,
                 bool squared) {
  const int K = static_cast<int>(stats.omega.size());
  double acc = 0.0;
  for (int kp = 0; kp < K; ++kp) {
    if (kp == k) continue;
    const auto& o = stats.omega[kp];
    for (Eigen::Index n = 0; n < o.rows(); ++n) {
      double denom = sur.gamma_tilde[kp][n] + sur.sigma2;
      for (int i = 0; i < K; ++i) {
        if (i == kp) continue;
        for (Eigen::Index mp = 0; mp < o.cols(); ++mp) {
          const double p = (i == k && mp == m) ? xbar : x.lambda[i][mp];
          denom += o(n, mp) * p;
        }
      }
      acc += squared ? o(n, m) * o(n, m) / (denom * denom) : o(n, m) / denom;
    }
  }
  return acc;
}

// Gauss-Seidel / Newton kernel over beams at a fixed water level. Keeps the
// per-(UT, rx-direction) interference floors incrementally up to date so a
// single marginal-utility evaluation costs O(sum_{k' != k} N_k').
class WaterfillKernel {
 public:
  WaterfillKernel(const ChannelStats& stats, const Surrogate& sur,
                  const SolverConfig& cfg)
      : stats_(stats), sur_(sur), cfg_(cfg),
        K_(static_cast<int>(stats.omega.size())),
        M_(static_cast<int>(stats.omega[0].cols())) {
    dead_.assign(K_, std::vector<char>(M_, 0));
    for (int k = 0; k < K_; ++k)
      for (int m = 0; m < M_; ++m) {
        double cross_gain = 0.0;
        for (int kp = 0; kp < K_; ++kp) {
          if (kp == k) continue;
          cross_gain += stats_.omega[kp].col(m).sum();
        }
        dead_[k][m] = (sur_.gamma[k][m] == 0.0 && cross_gain == 0.0) ? 1 : 0;
      }
  }

  void reset(const PowerAllocation& start) {
    x_ = start.lambda;
    for (int k = 0; k < K_; ++k)
      for (int m = 0; m < M_; ++m)
        if (dead_[k][m]) x_[k][m] = 0.0;
    refresh_floors();
  }

  // One pass over all beams; returns the largest power change.
  double sweep(double mu) {
    double max_dx = 0.0;
    for (int k = 0; k < K_; ++k)
      for (int m = 0; m < M_; ++m) {
        if (dead_[k][m]) continue;
        const double xn = best_response(k, m, mu);
        max_dx = std::max(max_dx, std::abs(xn - x_[k][m]));
        set_power(k, m, xn);
      }
    return max_dx;
  }

  // Sweeps until the beam powers stabilize; returns the total power. The
  // final polish runs with a threshold well below the Newton tolerance so
  // the total is accurate enough for the water-level refinement.
  double solve_at(double mu, bool tight) {
    refresh_floors();
    const double tol = tight ? 1e-3 * cfg_.eps4 : cfg_.eps4;
    for (int s = 0; s < kMaxSweeps; ++s)
      if (sweep(mu) <= tol) break;
    return total();
  }

  double total() const {
    double t = 0.0;
    for (const auto& lam : x_) t += lam.sum();
    return t;
  }

  PowerAllocation allocation() const {
    PowerAllocation a;
    a.lambda = x_;
    return a;
  }

  // nu at the current in-kernel powers
  double nu(int k, int m, double xbar, double mu) const {
    const double g = sur_.gamma[k][m];
    double v = g / (1.0 + g * xbar) - sur_.d[k][m] - mu;
    const double dx = xbar - x_[k][m];
    for (int kp = 0; kp < K_; ++kp) {
      if (kp == k) continue;
      const auto& o = stats_.omega[kp];
      for (Eigen::Index n = 0; n < o.rows(); ++n)
        v += o(n, m) / (floor_[kp][n] + o(n, m) * dx);
    }
    return v;
  }

  double nu_prime(int k, int m, double xbar) const {
    const double g = sur_.gamma[k][m];
    const double r = 1.0 + g * xbar;
    double v = -g * g / (r * r);
    const double dx = xbar - x_[k][m];
    for (int kp = 0; kp < K_; ++kp) {
      if (kp == k) continue;
      const auto& o = stats_.omega[kp];
      for (Eigen::Index n = 0; n < o.rows(); ++n) {
        const double den = floor_[kp][n] + o(n, m) * dx;
        v -= o(n, m) * o(n, m) / (den * den);
      }
    }
    return v;
  }

  double kkt_residual(double mu) const {
    double r = 0.0;
    for (int k = 0; k < K_; ++k)
      for (int m = 0; m < M_; ++m) {
        if (dead_[k][m]) continue;
        if (x_[k][m] > 1e-10)
          r = std::max(r, std::abs(nu(k, m, x_[k][m], mu)));
        else
          r = std::max(r, std::max(0.0, nu(k, m, 0.0, mu)));
      }
    return r;
  }

 private:
  static constexpr int kMaxSweeps = 200;

  void refresh_floors() {
    floor_.assign(K_, Eigen::VectorXd());
    for (int k = 0; k < K_; ++k) {
      Eigen::VectorXd cross = Eigen::VectorXd::Zero(M_);
      for (int i = 0; i < K_; ++i)
        if (i != k) cross += x_[i];
      floor_[k] = (stats_.omega[k] * cross).array() + sur_.gamma_tilde[k].array() +
                  sur_.sigma2;
    }
  }

  void set_power(int k, int m, double v) {
    const double dx = v - x_[k][m];
    if (dx == 0.0) return;
    x_[k][m] = v;
    for (int kp = 0; kp < K_; ++kp) {
      if (kp == k) continue;
      floor_[kp] += dx * stats_.omega[kp].col(m);
    }
  }

  // Optimal power of one beam given the others: Newton-Raphson on nu with a
  // bisection fallback (nu is strictly decreasing).
  double best_response(int k, int m, double mu) {
    if (nu(k, m, 0.0, mu) <= 0.0) return 0.0;
    double xb = std::max(x_[k][m], 0.0);
    for (int it = 0; it < cfg_.max_newton_iter; ++it) {
      const double f = nu(k, m, xb, mu);
      const double fp = nu_prime(k, m, xb);
      if (fp >= 0.0) break;  // degenerate; use bisection
      double xn = xb - f / fp;
      if (xn < 0.0) xn = 0.0;  // overshoot from the right; root is > 0
      if (std::abs(xn - xb) <= cfg_.eps4) return xn;
      xb = xn;
    }
    // bracketed bisection fallback
    double lo = 0.0, hi = std::max(1.0, 2.0 * xb);
    while (nu(k, m, hi, mu) > 0.0 && hi < 1e30) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > cfg_.eps4; ++it) {
      const double mid = 0.5 * (lo + hi);
      (nu(k, m, mid, mu) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const ChannelStats& stats_;
  const Surrogate& sur_;
  const SolverConfig& cfg_;
  int K_, M_;
  std::vector<Eigen::VectorXd> x_;
  std::vector<Eigen::VectorXd> floor_;
  std::vector<std::vector<char>> dead_;
};

}  // namespace

double marginal_utility(const ChannelStats& stats, const Surrogate& sur,
                        const PowerAllocation& x, int k, int m, double xbar,
                        double mu) {
  const double g = sur.gamma[k][m];
  return g / (1.0 + g * xbar) - sur.d[k][m] - mu +
         cross_sum(stats, sur, x, k, m, xbar, false);
}

double marginal_utility_deriv(const ChannelStats& stats, const Surrogate& sur,
                              const PowerAllocation& x, int k, int m,
                              double xbar) {
  const double g = sur.gamma[k][m];
  const double r = 1.0 + g * xbar;
  return -g * g / (r * r) - cross_sum(stats, sur, x, k, m, xbar, true);
}

double water_level_upper_bound(const ChannelStats& stats,
                               const Surrogate& sur) {
  const int K = static_cast<int>(stats.omega.size());
  const int M = static_cast<int>(stats.omega[0].cols());
  double bound = 0.0;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) {
      double v = sur.gamma[k][m] - sur.d[k][m];
      for (int kp = 0; kp < K; ++kp) {
        if (kp == k) continue;
        const auto& o = stats.omega[kp];
        for (Eigen::Index n = 0; n < o.rows(); ++n)
          v += o(n, m) / (sur.gamma_tilde[kp][n] + sur.sigma2);
      }
      bound = std::max(bound, v);
    }
  return bound;
}

namespace {

struct FrozenResult {
  PowerAllocation alloc;
  double mu = 0.0;
  bool converged = false;
  bool saturated = false;
  double kkt_residual = 0.0;
  int iters = 0;
};

// One Algorithm-2 pass with the given (fixed) gammas: a safeguarded-secant
// search for the water level around Gauss-Seidel Newton sweeps. warm_mu > 0
// seeds the search near a previous solution. `tight` selects the final
// power-balance precision.
FrozenResult solve_frozen(const ChannelStats& stats, const Surrogate& sur,
                          double p_t, const SolverConfig& cfg,
                          const PowerAllocation& warm, double warm_mu,
                          bool tight) {
  FrozenResult res;
  const double mu_max = water_level_upper_bound(stats, sur);
  WaterfillKernel kernel(stats, sur, cfg);

  if (p_t == 0.0 || mu_max <= 0.0) {
    // no power to place, or no beam worth power at any level
    PowerAllocation zero;
    zero.lambda.assign(stats.omega.size(),
                       Eigen::VectorXd::Zero(stats.omega[0].cols()));
    res.alloc = zero;
    res.mu = p_t == 0.0 ? std::max(mu_max, 0.0) : 0.0;
    res.saturated = p_t > 0.0;
    res.converged = true;
    kernel.reset(zero);
    res.kkt_residual = kernel.kkt_residual(res.mu);
    return res;
  }

  const double eps5_abs = cfg.eps5 * std::max(p_t, 1.0);
  const double tol_bal = (tight ? 1e-12 : cfg.eps5) * std::max(p_t, 1.0);
  kernel.reset(warm);

  double lo = 0.0, hi = mu_max;       // S(lo) >= p_t >= S(hi) by construction
  double mu = (warm_mu > 0.0 && warm_mu < mu_max) ? warm_mu
                                                  : 0.5 * (lo + hi);
  double mu_prev = 0.0, sum_prev = 0.0;
  bool have_prev = false;
  int since_bisect = 0;
  double best_err = std::numeric_limits<double>::infinity();
  double best_mu = mu;
  PowerAllocation best_alloc;

  for (int it = 0; it < cfg.max_bisect_iter; ++it) {
    const double sum = kernel.solve_at(mu, tight);
    res.iters = it + 1;
    const double err = std::abs(sum - p_t);
    if (err < best_err) {
      best_err = err;
      best_mu = mu;
      best_alloc = kernel.allocation();
    }
    if (err <= tol_bal) break;
    if (sum < p_t)
      hi = mu;
    else
      lo = mu;
    if (hi <= 1e-14 * mu_max) {
      // the unconstrained optimum uses less than p_t: constraint is slack
      res.saturated = true;
      best_mu = 0.0;
      best_alloc = kernel.allocation();
      break;
    }
    if (hi - lo <= 1e-16 * mu_max) break;

    // secant step when it lands inside the bracket; periodic bisection
    // keeps the bracket shrinking when the secant stagnates on one side
    double mu_next = 0.5 * (lo + hi);
    if (since_bisect < 3 && have_prev && sum != sum_prev) {
      const double cand = mu + (p_t - sum) * (mu - mu_prev) / (sum - sum_prev);
      if (cand > lo && cand < hi) {
        mu_next = cand;
        ++since_bisect;
      } else {
        since_bisect = 0;
      }
    } else {
      since_bisect = 0;
    }
    mu_prev = mu;
    sum_prev = sum;
    have_prev = true;
    mu = mu_next;
  }

  // leave the kernel at the chosen water level so the residual matches
  kernel.reset(best_alloc);
  kernel.solve_at(best_mu, tight);
  res.alloc = kernel.allocation();
  res.mu = res.saturated ? 0.0 : best_mu;
  res.converged = res.saturated || best_err <= eps5_abs;
  res.kkt_residual = kernel.kkt_residual(res.mu);
  return res;
}

bool dead_channel(const Eigen::MatrixXd& omega) {
  return omega.maxCoeff() <= 0.0;
}

}  // namespace

WaterfillResult waterfill(const ChannelStats& stats, const Surrogate& sur,
                          double p_t, const SolverConfig& cfg,
                          const WaterfillResult* warm) {
  if (p_t < 0) throw std::invalid_argument("waterfill: P_T must be >= 0");
  const int K = static_cast<int>(stats.omega.size());

  Surrogate cur = sur;
  std::vector<char> dead(K, 0);
  bool any_alive = false;
  for (int k = 0; k < K; ++k) {
    dead[k] = dead_channel(stats.omega[k]) ? 1 : 0;
    any_alive = any_alive || !dead[k];
  }

  WaterfillResult res;
  PowerAllocation x = sur.anchor;
  double warm_mu = 0.0;
  if (warm && warm->converged &&
      warm->consistent.gamma.size() == sur.gamma.size()) {
    // continue from a neighboring solution: its gammas and allocation are
    // already near the fixed point for nearby P_T
    cur.gamma = warm->consistent.gamma;
    cur.gamma_tilde = warm->consistent.gamma_tilde;
    cur.trace_const = warm->consistent.trace_const;
    x = warm->alloc;
    warm_mu = warm->mu_star;
  }
  FrozenResult fro;
  std::vector<DeState> states(K);
  const double tol_refresh = 1e-9 * std::max(1.0, p_t);
  const double tol_loose = 1e-6 * std::max(1.0, p_t);
  constexpr int kMaxRefresh = 160;
  bool stable = false;

  // The (gammas -> allocation -> gammas) fixed point converges linearly and
  // often with an alternating dominant mode; Anderson depth-1 mixing on the
  // concatenated gamma vector removes it. Safeguarded: clamped mixing
  // weight, gammas kept nonnegative.
  Eigen::VectorXd u_prev, w_prev, f_prev;
  const auto pack_gammas = [&](const Surrogate& s) {
    Eigen::Index n = 0;
    for (int k = 0; k < K; ++k)
      if (!dead[k]) n += s.gamma[k].size() + s.gamma_tilde[k].size();
    Eigen::VectorXd v(n);
    Eigen::Index at = 0;
    for (int k = 0; k < K; ++k) {
      if (dead[k]) continue;
      v.segment(at, s.gamma[k].size()) = s.gamma[k];
      at += s.gamma[k].size();
      v.segment(at, s.gamma_tilde[k].size()) = s.gamma_tilde[k];
      at += s.gamma_tilde[k].size();
    }
    return v;
  };
  const auto unpack_gammas = [&](const Eigen::VectorXd& v, Surrogate& s) {
    Eigen::Index at = 0;
    for (int k = 0; k < K; ++k) {
      if (dead[k]) continue;
      s.gamma[k] = v.segment(at, s.gamma[k].size()).cwiseMax(0.0);
      at += s.gamma[k].size();
      s.gamma_tilde[k] =
          v.segment(at, s.gamma_tilde[k].size()).cwiseMax(0.0);
      at += s.gamma_tilde[k].size();
    }
  };

  // phase 1 solves the inner problem loosely while the gammas settle; the
  // tight phase then pins the power balance down to the reporting precision
  bool tight = warm_mu > 0.0;
  for (int r = 0; r < kMaxRefresh; ++r) {
    const Eigen::VectorXd u = pack_gammas(cur);
    fro = solve_frozen(stats, cur, p_t, cfg, x, r > 0 ? fro.mu : warm_mu,
                       tight);
    double delta = 0.0;
    for (int k = 0; k < K; ++k)
      delta = std::max(
          delta, (fro.alloc.lambda[k] - x.lambda[k]).cwiseAbs().maxCoeff());
    x = fro.alloc;
#ifdef BEAMRE_TRACE_REFRESH
    std::fprintf(stderr, "refresh %d tight=%d delta=%.3e mu=%.6g sum=%.12g\n",
                 r, tight, delta, fro.mu, x.total());
#endif

    // re-solve the DE at the new allocation; degenerate UTs keep the
    // caller's gammas (the DE cannot see a zero coupling matrix)
    for (int k = 0; k < K; ++k) {
      if (dead[k]) continue;
      states[k] =
          de_fixed_point(stats, x, k, cur.sigma2, cfg.eps1, cfg.max_fp_iter);
      cur.gamma[k] = states[k].gamma;
      cur.gamma_tilde[k] = states[k].gamma_tilde;
      cur.trace_const[k] =
          (1.0 - states[k].phi_tilde.array().inverse()).sum();
    }
    if (!any_alive ||
        ((r > 0 || warm_mu > 0.0) && tight && delta <= tol_refresh)) {
      stable = true;
      break;
    }
    if (!tight && delta <= tol_loose) {
      tight = true;  // gammas settled; finish at full precision
      u_prev.resize(0);
      w_prev.resize(0);
      f_prev.resize(0);
      continue;
    }

    const Eigen::VectorXd w = pack_gammas(cur);
    const Eigen::VectorXd f = w - u;
    if (w_prev.size() == w.size()) {
      const Eigen::VectorXd df = f - f_prev;
      const double denom = df.squaredNorm();
      if (denom > 0) {
        double theta = f.dot(df) / denom;
        theta = std::clamp(theta, -5.0, 5.0);
        const Eigen::VectorXd mixed = w - theta * (w - w_prev);
        unpack_gammas(mixed, cur);
      }
    }
    u_prev = u;
    w_prev = w;
    f_prev = f;
  }

  res.alloc = x;
  res.mu_star = fro.mu;
  res.saturated = fro.saturated;
  res.converged = fro.converged && stable;
  res.bisect_iters = fro.iters;
  res.consistent = cur;

  // stationarity with the refreshed gammas (Eq. 43 with starred quantities)
  double resid = 0.0;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < static_cast<int>(stats.omega[0].cols()); ++m) {
      const double xkm = x.lambda[k][m];
      if (xkm > 1e-10)
        resid = std::max(resid, std::abs(marginal_utility(stats, cur, x, k, m,
                                                          xkm, res.mu_star)));
      else
        resid = std::max(resid, std::max(0.0, marginal_utility(
                                                  stats, cur, x, k, m, 0.0,
                                                  res.mu_star)));
    }
  res.kkt_residual = resid;

  // exact inner objective at the solution: DE log-det terms at x (frozen
  // form for degenerate UTs) minus the linearized interference
  double gbar = 0.0;
  for (int k = 0; k < K; ++k) {
    if (dead[k]) {
      const Eigen::VectorXd kbar =
          interference_floor(stats, x, k, cur.sigma2);
      gbar += (cur.gamma[k].array() * x.lambda[k].array()).log1p().sum();
      gbar += (cur.gamma_tilde[k].array() + kbar.array()).log().sum();
      gbar -= cur.trace_const[k];
    } else {
      if (!states[k].converged)
        throw std::runtime_error("waterfill: DE refresh did not converge");
      gbar += de_rate(states[k], x, k, stats, cur.sigma2) * kLn2 +
              interference_lndet(stats, x, k, cur.sigma2);
    }
  }
  res.se_nats =
      gbar - linearized_interference(sur.f_anchor, sur.d, x, sur.anchor);
  res.se_value = res.se_nats / kLn2;
  return res;
}

double re_power_derivative(double p_t, double se, double dse_dpt,
                           const SystemParams& params) {
  const double p_den = params.xi * p_t + params.M * params.Pc + params.Ps;
  const double p_tot = budget_power(params);
  const double ee_over_w = se / p_den;
  return ((1.0 + params.beta * p_den / p_tot) * dse_dpt -
          params.xi * ee_over_w) /
         p_den;
}

PtSearchResult search_transmit_power(const ChannelStats& stats,
                                     const Surrogate& sur,
                                     const SystemParams& params,
                                     const SolverConfig& cfg) {
  const double pmax = params.Pmax;
  const double eps2_abs = cfg.eps2 * pmax;
  const double p_tot = budget_power(params);

  const auto re_nats = [&](double p, double se_nats) {
    const double p_den = params.xi * p + params.M * params.Pc + params.Ps;
    return (1.0 / p_den + params.beta / p_tot) * se_nats;
  };

  PtSearchResult out;
  double p = 0.5 * pmax;
  WaterfillResult wf = waterfill(stats, sur, p, cfg);
  double re = re_nats(p, wf.se_nats);
  double g = re_power_derivative(p, wf.se_nats, wf.mu_star, params);
  out.trace.push_back({p, re / kLn2, g / kLn2});

  double best_p = p, best_re = re;
  WaterfillResult best_wf = wf;

  if (g != 0.0) {
    double step = cfg.step_scale * pmax / std::abs(g);
    constexpr int kMaxPtIter = 500;
    for (int t = 0; t < kMaxPtIter; ++t) {
      const double pn = std::clamp(p + step * g, 0.0, pmax);
      if (std::abs(pn - p) <= eps2_abs) {
        out.converged = true;
        break;
      }
      WaterfillResult wfn = waterfill(stats, sur, pn, cfg, &wf);
      const double ren = re_nats(pn, wfn.se_nats);
      const double gn = re_power_derivative(pn, wfn.se_nats, wfn.mu_star, params);
      out.trace.push_back({pn, ren / kLn2, gn / kLn2});
      if (ren < re) {
        step *= 0.5;  // quasi-concave objective: overshoot, back off
        if (step * std::max(std::abs(g), std::abs(gn)) < 1e-12 * pmax) {
          out.stalled = true;
          out.converged = true;
          break;
        }
        continue;
      }
      p = pn;
      re = ren;
      g = gn;
      wf = wfn;
      if (re > best_re) {
        best_re = re;
        best_p = p;
        best_wf = wf;
      }
    }
  } else {
    out.converged = true;
  }

  out.p_opt = best_p;
  out.re_value = best_re / kLn2;
  out.best = best_wf;
  return out;
}

}  // namespace beamre
