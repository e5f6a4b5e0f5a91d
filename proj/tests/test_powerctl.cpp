#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "beamre/oracle.hpp"
#include "beamre/powerctl.hpp"
#include "helpers.hpp"

using namespace beamre;
using namespace beamre::testing;

namespace {

// hand-built single-user surrogate with prescribed gammas; anchor at zero
Surrogate single_user(const Eigen::VectorXd& gamma, ChannelStats& stats) {
  const int m = static_cast<int>(gamma.size());
  stats.omega = {Eigen::MatrixXd::Zero(1, m)};
  Surrogate s;
  s.sigma2 = 1.0;
  s.gamma = {gamma};
  s.gamma_tilde = {Eigen::VectorXd::Zero(1)};
  s.d = {Eigen::VectorXd::Zero(m)};
  s.trace_const = {0.0};
  s.anchor.lambda = {Eigen::VectorXd::Zero(m)};
  s.f_anchor = 0.0;
  return s;
}

}  // namespace

TEST_CASE("marginal utility basics") {
  ChannelStats stats;
  Eigen::VectorXd gamma(2);
  gamma << 4.0, 1.0;
  const Surrogate sur = single_user(gamma, stats);
  PowerAllocation x;
  x.lambda = {Eigen::VectorXd::Zero(2)};

  // single user, zero power, zero level: the marginal utility is gamma
  CHECK(marginal_utility(stats, sur, x, 0, 0, 0.0, 0.0) == doctest::Approx(4.0));
  CHECK(marginal_utility(stats, sur, x, 0, 1, 0.0, 0.0) == doctest::Approx(1.0));

  // root of nu at level mu is 1/mu - 1/gamma
  const double mu = 0.5;
  const double root = 1.0 / mu - 1.0 / 4.0;
  CHECK(marginal_utility(stats, sur, x, 0, 0, root, mu) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // strictly decreasing in xbar
  double prev = marginal_utility(stats, sur, x, 0, 0, 0.0, 0.0);
  for (double xb : {0.1, 0.5, 1.0, 3.0}) {
    const double v = marginal_utility(stats, sur, x, 0, 0, xb, 0.0);
    CHECK(v < prev);
    prev = v;
  }

  // derivative at zero is -gamma^2
  CHECK(marginal_utility_deriv(stats, sur, x, 0, 0, 0.0) ==
        doctest::Approx(-16.0));
}

TEST_CASE("marginal utility derivative matches finite differences") {
  SolverConfig cfg;
  const Instance in = make_instance(6, 3, 2, 77);
  const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
  const PowerAllocation x = random_feasible(in.params, 5, in.params.Pmax);

  Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    const int k = static_cast<int>(rng.uniform_int(0, in.params.K - 1));
    const int m = static_cast<int>(rng.uniform_int(0, in.params.M - 1));
    const double x0 = rng.uniform() * 2.0;
    const double analytic = marginal_utility_deriv(in.stats, sur, x, k, m, x0);
    const auto f = [&](double xb) {
      return marginal_utility(in.stats, sur, x, k, m, xb, 0.0);
    };
    CHECK(fd_gap(f, analytic, x0, 1e-5) <= 1e-6);
    CHECK(analytic <= 0.0);
  }
}

TEST_CASE("water level upper bound") {
  ChannelStats stats;
  Eigen::VectorXd gamma(2);
  gamma << 4.0, 1.0;
  const Surrogate sur = single_user(gamma, stats);
  CHECK(water_level_upper_bound(stats, sur) == doctest::Approx(4.0));

  ChannelStats stats0;
  const Surrogate sur0 = single_user(Eigen::VectorXd::Zero(2), stats0);
  CHECK(water_level_upper_bound(stats0, sur0) == doctest::Approx(0.0));

  // every beam's marginal utility at zero power and zero cross power is
  // below the bound
  SolverConfig cfg;
  const Instance in = make_instance(6, 3, 2, 78);
  const Surrogate s = anchored_surrogate(in, cfg, in.params.Pmax);
  const double bound = water_level_upper_bound(in.stats, s);
  PowerAllocation zero = PowerAllocation::zeros(in.params);
  for (int k = 0; k < in.params.K; ++k)
    for (int m = 0; m < in.params.M; ++m)
      CHECK(marginal_utility(in.stats, s, zero, k, m, 0.0, 0.0) <=
            bound + 1e-12);
}

TEST_CASE("waterfill single-user closed form") {
  ChannelStats stats;
  Eigen::VectorXd gamma(2);
  gamma << 4.0, 1.0;
  const Surrogate sur = single_user(gamma, stats);
  SolverConfig cfg;

  const WaterfillResult r = waterfill(stats, sur, 1.0, cfg);
  REQUIRE(r.converged);
  CHECK(r.alloc.lambda[0][0] == doctest::Approx(0.875).epsilon(1e-8));
  CHECK(r.alloc.lambda[0][1] == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(r.mu_star == doctest::Approx(8.0 / 9.0).epsilon(1e-8));
  CHECK(r.kkt_residual <= 1e-6);
  // surrogate SE here is exactly log2(1+4*0.875) + log2(1+0.125)
  CHECK(r.se_value ==
        doctest::Approx(std::log2(4.5) + std::log2(1.125)).epsilon(1e-7));
}

TEST_CASE("waterfill degenerate cases") {
  ChannelStats stats;
  Eigen::VectorXd gamma(2);
  gamma << 4.0, 1.0;
  const Surrogate sur = single_user(gamma, stats);
  SolverConfig cfg;

  const WaterfillResult r0 = waterfill(stats, sur, 0.0, cfg);
  CHECK(r0.converged);
  CHECK(r0.alloc.total() == 0.0);
  CHECK(r0.se_value == doctest::Approx(0.0));
  CHECK(r0.mu_star == doctest::Approx(4.0));  // marginal utility at zero

  CHECK_THROWS_AS(waterfill(stats, sur, -1.0, cfg), std::invalid_argument);

  // dead channel: all beams pruned, saturated at zero
  ChannelStats stats0;
  const Surrogate sur0 = single_user(Eigen::VectorXd::Zero(2), stats0);
  const WaterfillResult rz = waterfill(stats0, sur0, 1.0, cfg);
  CHECK(rz.converged);
  CHECK(rz.saturated);
  CHECK(rz.alloc.total() == 0.0);
  CHECK(rz.mu_star == 0.0);
}

TEST_CASE("waterfill KKT conditions on random multi-user instances") {
  SolverConfig cfg;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = make_instance(4, 3, 2, 200 + seed);
    const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
    const double pt = in.params.Pmax * (0.2 + 0.06 * seed);
    const WaterfillResult r = waterfill(in.stats, sur, pt, cfg);
    REQUIRE(r.converged);

    // stationarity across beams (water levels equal)
    CHECK(r.kkt_residual <= 1e-6);
    // complementary slackness
    CHECK(r.mu_star >= 0.0);
    CHECK(std::abs(r.mu_star * (r.alloc.total() - pt)) <= 1e-8);
    // power balance unless saturated
    if (!r.saturated)
      CHECK(std::abs(r.alloc.total() - pt) <= cfg.eps5 * std::max(pt, 1.0));
    // nonnegativity
    for (const auto& lam : r.alloc.lambda) CHECK((lam.array() >= 0).all());

    // inactive beams satisfy nu(0) <= 0 at the solution's gammas
    for (int k = 0; k < in.params.K; ++k)
      for (int m = 0; m < in.params.M; ++m)
        if (r.alloc.lambda[k][m] <= 1e-10)
          CHECK(marginal_utility(in.stats, r.consistent, r.alloc, k, m, 0.0,
                                 r.mu_star) <= 1e-6);
  }
}

TEST_CASE("dSE/dP_T equals the water level") {
  SolverConfig cfg;
  const Instance in = make_instance(6, 2, 2, 301);
  const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);

  Rng rng(55);
  for (int t = 0; t < 10; ++t) {
    const double pt = (0.05 + 0.9 * rng.uniform()) * in.params.Pmax;
    const WaterfillResult r = waterfill(in.stats, sur, pt, cfg);
    REQUIRE(r.converged);
    const double delta = 1e-4 * std::max(pt, 1.0);
    const auto se_of = [&](double p) {
      return waterfill(in.stats, sur, p, cfg).se_nats;
    };
    const double fd = (se_of(pt + delta) - se_of(pt - delta)) / (2 * delta);
    CHECK(std::abs(fd - r.mu_star) <=
          std::max(1e-3 * std::abs(r.mu_star), 1e-8));
  }
}

TEST_CASE("re_power_derivative signs and finite-difference match") {
  const SystemParams p = desk_params(4, 2, 2, 10.0, 0.0);

  // beta=0, dSE/dP_T=0, SE>0: strictly negative
  CHECK(re_power_derivative(1.0, 5.0, 0.0, p) < 0.0);
  // SE=0 with positive dSE/dP_T: strictly positive
  CHECK(re_power_derivative(1.0, 0.0, 2.0, p) > 0.0);

  SolverConfig cfg;
  const Instance in = make_instance(6, 2, 2, 302);
  const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
  const double p_tot = budget_power(in.params);
  const auto re_of = [&](double pt) {
    const WaterfillResult r = waterfill(in.stats, sur, pt, cfg);
    const double den =
        in.params.xi * pt + in.params.M * in.params.Pc + in.params.Ps;
    return (1.0 / den + in.params.beta / p_tot) * r.se_nats;
  };
  Rng rng(66);
  for (int t = 0; t < 5; ++t) {
    const double pt = (0.1 + 0.8 * rng.uniform()) * in.params.Pmax;
    const WaterfillResult r = waterfill(in.stats, sur, pt, cfg);
    const double analytic =
        re_power_derivative(pt, r.se_nats, r.mu_star, in.params);
    CHECK(fd_gap(re_of, analytic, pt, 1e-3 * in.params.Pmax) <= 1e-3);
  }
}

TEST_CASE("transmit power search finds the boundary on monotone RE") {
  // low budget: RE increases over the whole range, so full power wins
  SolverConfig cfg;
  const Instance in = make_instance(8, 2, 2, 401, /*pmax=*/0.1);
  const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
  const PtSearchResult r = search_transmit_power(in.stats, sur, in.params, cfg);
  CHECK(r.converged);
  CHECK(r.p_opt >= 0.99 * in.params.Pmax);
}

TEST_CASE("transmit power search matches a dense scan at high budget") {
  SolverConfig cfg;
  const Instance in = make_instance(4, 2, 1, 402, /*pmax=*/100.0);
  const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
  const PtSearchResult r = search_transmit_power(in.stats, sur, in.params, cfg);
  REQUIRE(r.converged);

  const double p_tot = budget_power(in.params);
  double best_re = -1e300, best_pt = 0.0;
  const int grid = 1000;
  const double spacing = in.params.Pmax / grid;
  for (int i = 0; i <= grid; ++i) {
    const double pt = i * spacing;
    const WaterfillResult w = waterfill(in.stats, sur, pt, cfg);
    const double den =
        in.params.xi * pt + in.params.M * in.params.Pc + in.params.Ps;
    const double re = (1.0 / den + in.params.beta / p_tot) * w.se_nats;
    if (re > best_re) {
      best_re = re;
      best_pt = pt;
    }
  }
  CHECK(best_pt > spacing);  // interior optimum
  CHECK(best_pt < in.params.Pmax - spacing);
  CHECK(std::abs(r.p_opt - best_pt) <= 2.0 * spacing);

  // the trace respects unimodality: sorted by P_T, the RE samples never
  // dip and then rise again beyond tolerance
  auto pts = r.trace;
  std::sort(pts.begin(), pts.end(),
            [](const PtPoint& a, const PtPoint& b) { return a.p_t < b.p_t; });
  bool decreasing = false;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].re < pts[i - 1].re - 1e-8) decreasing = true;
    else if (decreasing)
      CHECK(pts[i].re <= pts[i - 1].re + 1e-8);
  }
}
