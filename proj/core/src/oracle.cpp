#include "beamre/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "beamre/de.hpp"
#include "beamre/rates.hpp"

namespace beamre {

namespace {

// surrogate gradient over all beams (no water level), nats/W
std::vector<Eigen::VectorXd> surrogate_gradient(const ChannelStats& stats,
                                                const Surrogate& sur,
                                                const PowerAllocation& x) {
  const int K = static_cast<int>(stats.omega.size());
  const Eigen::Index M = stats.omega[0].cols();

  std::vector<Eigen::VectorXd> own(K);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(M);
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd cross = Eigen::VectorXd::Zero(M);
    for (int i = 0; i < K; ++i)
      if (i != k) cross += x.lambda[i];
    const Eigen::VectorXd floor =
        (stats.omega[k] * cross).array() + sur.gamma_tilde[k].array() +
        sur.sigma2;
    own[k] = stats.omega[k].transpose() * floor.cwiseInverse();
    total += own[k];
  }
  std::vector<Eigen::VectorXd> g(K);
  for (int k = 0; k < K; ++k) {
    g[k] = (sur.gamma[k].array() /
            (1.0 + sur.gamma[k].array() * x.lambda[k].array()))
               .matrix();
    g[k] += total - own[k] - sur.d[k];
  }
  return g;
}

}  // namespace

std::pair<PowerAllocation, double> grid_search_re(const ChannelStats& stats,
                                                  const SystemParams& params,
                                                  const SolverConfig& cfg,
                                                  int grid_points_per_dim) {
  const int dim = params.K * params.M;
  if (dim > 6)
    throw std::invalid_argument("grid_search_re: K*M capped at 6 dimensions");
  if (grid_points_per_dim < 2)
    throw std::invalid_argument("grid_search_re: need >= 2 points per dim");

  const double step = params.Pmax / (grid_points_per_dim - 1);
  const double budget = params.Pmax * (1.0 + 1e-12);

  PowerAllocation point = PowerAllocation::zeros(params);
  PowerAllocation best = point;
  double best_re = de_re(stats, point, params, cfg);

  // depth-first over coordinates; larger grid values only grow the sum, so
  // a budget overrun prunes the rest of the coordinate's range
  std::function<void(int, double)> visit = [&](int d, double used) {
    if (d == dim) {
      const double re = de_re(stats, point, params, cfg);
      if (re > best_re) {
        best_re = re;
        best = point;
      }
      return;
    }
    const int k = d / params.M, m = d % params.M;
    for (int i = 0; i < grid_points_per_dim; ++i) {
      const double v = i * step;
      if (used + v > budget) break;
      point.lambda[k][m] = v;
      visit(d + 1, used + v);
    }
    point.lambda[k][m] = 0.0;
  };
  visit(0, 0.0);
  return {best, best_re};
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& z,
                                       double total) {
  Eigen::VectorXd y = z.cwiseMax(0.0);
  if (y.sum() <= total) return y;
  // Euclidean projection onto {x >= 0, sum = total}
  std::vector<double> u(z.data(), z.data() + z.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - total) / static_cast<double>(j + 1);
    if (u[j] - t > 0) {
      rho = static_cast<int>(j + 1);
      theta = t;
    }
  }
  (void)rho;
  return (z.array() - theta).cwiseMax(0.0);
}

std::pair<PowerAllocation, double> projected_gradient_inner(
    const ChannelStats& stats, const Surrogate& sur, double p_t) {
  if (p_t < 0)
    throw std::invalid_argument("projected_gradient_inner: P_T must be >= 0");
  const int K = static_cast<int>(stats.omega.size());
  const int M = static_cast<int>(stats.omega[0].cols());
  const int dim = K * M;

  std::vector<char> dead(K, 0);
  for (int k = 0; k < K; ++k)
    dead[k] = stats.omega[k].maxCoeff() <= 0.0 ? 1 : 0;

  // gammas re-solved at the evaluation point; degenerate UTs keep the
  // caller's (same convention as waterfill)
  const auto refreshed = [&](const PowerAllocation& a) {
    Surrogate cur = sur;
    for (int k = 0; k < K; ++k) {
      if (dead[k]) continue;
      const DeState st = de_fixed_point(stats, a, k, sur.sigma2, 1e-11, 5000);
      if (!st.converged)
        throw std::runtime_error("projected_gradient_inner: DE failed");
      cur.gamma[k] = st.gamma;
      cur.gamma_tilde[k] = st.gamma_tilde;
      cur.trace_const[k] = (1.0 - st.phi_tilde.array().inverse()).sum();
    }
    return cur;
  };
  // exact inner objective (nats): DE log-det terms minus linearized
  // interference
  const auto objective = [&](const PowerAllocation& a, const Surrogate& cur) {
    double gbar = 0.0;
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXd kbar =
          interference_floor(stats, a, k, sur.sigma2);
      gbar += (cur.gamma[k].array() * a.lambda[k].array()).log1p().sum();
      gbar += (cur.gamma_tilde[k].array() + kbar.array()).log().sum();
      gbar -= cur.trace_const[k];
    }
    return gbar -
           linearized_interference(sur.f_anchor, sur.d, a, sur.anchor);
  };

  const auto pack = [&](const PowerAllocation& a) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < K; ++k) v.segment(k * M, M) = a.lambda[k];
    return v;
  };
  const auto unpack = [&](const Eigen::VectorXd& v) {
    PowerAllocation a;
    a.lambda.resize(K);
    for (int k = 0; k < K; ++k) a.lambda[k] = v.segment(k * M, M);
    return a;
  };

  PowerAllocation x;
  x.lambda.assign(K, Eigen::VectorXd::Constant(M, p_t / dim));
  Surrogate cur = refreshed(x);
  double fx = objective(x, cur);
  if (p_t == 0.0) return {unpack(Eigen::VectorXd::Zero(dim)), fx};

  double t = std::max(p_t, 1.0);
  int stall = 0;
  constexpr int kMaxIter = 100000;
  for (int it = 0; it < kMaxIter && stall < 3; ++it) {
    // with the gammas at the point, this is the exact gradient of the DE
    // objective (its partials with respect to the gammas vanish)
    const auto grad = surrogate_gradient(stats, cur, x);
    Eigen::VectorXd gv(dim);
    for (int k = 0; k < K; ++k) gv.segment(k * M, M) = grad[k];

    bool accepted = false;
    while (t > 1e-18 * std::max(p_t, 1.0)) {
      const Eigen::VectorXd cand =
          project_capped_simplex(pack(x) + t * gv, p_t);
      const PowerAllocation xc = unpack(cand);
      const Surrogate curc = refreshed(xc);
      const double fc = objective(xc, curc);
      if (fc >= fx) {
        stall = (fc - fx <= 1e-9 * std::max(1.0, std::abs(fx))) ? stall + 1 : 0;
        x = xc;
        cur = curc;
        fx = fc;
        t *= 1.3;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // step underflow: converged
  }
  return {x, fx};
}

double fd_gap(const std::function<double(double)>& f, double analytic,
              double x0, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("fd_gap: delta must be > 0");
  const double fd = (f(x0 + delta) - f(x0 - delta)) / (2.0 * delta);
  const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-12});
  return std::abs(fd - analytic) / scale;
}

OracleReport de_vs_mc_report(const ChannelStats& stats,
                             const PowerAllocation& alloc,
                             const SystemParams& params, int n_samples,
                             std::uint64_t seed) {
  if (n_samples < 100)
    throw std::invalid_argument("de_vs_mc_report: need >= 100 samples");
  constexpr double kRateFloor = 1e-6;  // bits/s/Hz

  OracleReport rep;
  rep.kind = OracleReport::Kind::kDeVsMc;
  double se_de = 0.0, se_mc = 0.0;
  for (int k = 0; k < params.K; ++k) {
    const DeState st =
        de_fixed_point(stats, alloc, k, params.sigma2, 1e-8, 1000);
    const double rde = de_rate(st, alloc, k, stats, params.sigma2);
    const double rmc =
        mc_rate_approx(stats, alloc, k, params.sigma2, n_samples, seed);
    se_de += rde;
    se_mc += rmc;
    rep.details["user" + std::to_string(k) + "_gap"] =
        std::abs(rde - rmc) / std::max(rmc, kRateFloor);
  }
  rep.details["se_de"] = se_de;
  rep.details["se_mc"] = se_mc;
  rep.gap = std::abs(se_de - se_mc) / std::max(se_mc, kRateFloor);
  return rep;
}

}  // namespace beamre
