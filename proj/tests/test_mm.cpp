#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamre/mm.hpp"
#include "beamre/oracle.hpp"
#include "helpers.hpp"

using namespace beamre;
using namespace beamre::testing;

TEST_CASE("interference gradient examples") {
  // K = 1: empty sum
  {
    ChannelStats stats;
    stats.omega = {Eigen::MatrixXd::Constant(2, 3, 1.0)};
    PowerAllocation a;
    a.lambda = {Eigen::VectorXd::Constant(3, 0.5)};
    const auto d = interference_gradient(stats, a, 1.0);
    REQUIRE(d.size() == 1);
    CHECK(d[0].isZero());
  }
  // K=2, N=1, M=1, omega_2 = [2], lambda_1 = 0.5, sigma2 = 1
  {
    ChannelStats stats;
    stats.omega = {Eigen::MatrixXd::Constant(1, 1, 3.0),
                   Eigen::MatrixXd::Constant(1, 1, 2.0)};
    PowerAllocation a;
    a.lambda = {Eigen::VectorXd::Constant(1, 0.5),
                Eigen::VectorXd::Zero(1)};
    const auto d = interference_gradient(stats, a, 1.0);
    CHECK(d[0][0] == doctest::Approx(2.0 / (1.0 + 0.5 * 2.0)));  // = 1.0
    CHECK(d[1][0] == doctest::Approx(3.0 / 1.0));  // floor of UT 1 is sigma2
  }
  // all powers zero: d_k[t] = sum_{k' != k} sum_n omega_k'(n,t) / sigma2
  {
    ChannelStats stats;
    stats.omega = {Eigen::MatrixXd::Constant(2, 2, 1.0),
                   Eigen::MatrixXd::Constant(2, 2, 4.0)};
    PowerAllocation a;
    a.lambda = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
    const auto d = interference_gradient(stats, a, 2.0);
    CHECK(d[0][0] == doctest::Approx(2.0 * 4.0 / 2.0));
    CHECK(d[1][1] == doctest::Approx(2.0 * 1.0 / 2.0));
  }
}

TEST_CASE("linearized interference is tight at the anchor and bounds f") {
  SolverConfig cfg;
  const Instance in = make_instance(5, 3, 2, 91);
  const PowerAllocation anchor =
      PowerAllocation::uniform(in.params, in.params.Pmax);

  const auto f_sum = [&](const PowerAllocation& a) {
    double f = 0.0;
    for (int k = 0; k < in.params.K; ++k)
      f += interference_lndet(in.stats, a, k, in.params.sigma2);
    return f;
  };
  const double f_anchor = f_sum(anchor);
  const auto d = interference_gradient(in.stats, anchor, in.params.sigma2);

  // anchor tightness
  CHECK(linearized_interference(f_anchor, d, anchor, anchor) ==
        doctest::Approx(f_anchor).epsilon(1e-14));

  // upper bound at random points (concavity of the log-det term)
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PowerAllocation x =
        random_feasible(in.params, 500 + s, in.params.Pmax);
    const double bound = linearized_interference(f_anchor, d, x, anchor);
    CHECK(bound >= f_sum(x) - 1e-10 * std::max(1.0, std::abs(bound)));
  }

  // zero gradient makes it constant
  std::vector<Eigen::VectorXd> zero_d(in.params.K,
                                      Eigen::VectorXd::Zero(in.params.M));
  const PowerAllocation x2 = random_feasible(in.params, 7, in.params.Pmax);
  CHECK(linearized_interference(f_anchor, zero_d, x2, anchor) ==
        doctest::Approx(f_anchor));
}

TEST_CASE("surrogate equals the true DE objective at its anchor") {
  SolverConfig cfg;
  const Instance in = make_instance(6, 3, 2, 92);
  for (double frac : {0.2, 1.0}) {
    const PowerAllocation anchor =
        PowerAllocation::uniform(in.params, frac * in.params.Pmax);
    const auto states = de_states_all(in.stats, anchor, in.params, cfg);
    const Surrogate sur = make_surrogate(in.stats, anchor, in.params, states);

    double true_se = 0.0;
    for (int k = 0; k < in.params.K; ++k)
      true_se +=
          de_rate(states[k], anchor, k, in.stats, in.params.sigma2);
    const double sur_se = sur.se_nats(in.stats, anchor) / std::log(2.0);
    CHECK(sur_se == doctest::Approx(true_se).epsilon(1e-10));
  }
}

TEST_CASE("surrogate with fresh DE gammas lower-bounds the true objective") {
  // the MM bound: linearizing f while keeping the true DE rate term gives
  // a value no larger than the true DE objective
  SolverConfig cfg;
  const Instance in = make_instance(5, 2, 2, 93);
  const SystemParams& p = in.params;
  const PowerAllocation anchor = PowerAllocation::uniform(p, p.Pmax);
  const double f_anchor = [&] {
    double f = 0.0;
    for (int k = 0; k < p.K; ++k)
      f += interference_lndet(in.stats, anchor, k, p.sigma2);
    return f;
  }();
  const auto d = interference_gradient(in.stats, anchor, p.sigma2);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const PowerAllocation x = random_feasible(p, 900 + s, p.Pmax);
    double g_nats = 0.0;  // true DE log-det term at x, in nats
    double true_se_nats = 0.0;
    for (int k = 0; k < p.K; ++k) {
      const DeState st = de_fixed_point(in.stats, x, k, p.sigma2, 1e-10, 2000);
      REQUIRE(st.converged);
      const double rate_nats =
          de_rate(st, x, k, in.stats, p.sigma2) * std::log(2.0);
      true_se_nats += rate_nats;
      g_nats += rate_nats + interference_lndet(in.stats, x, k, p.sigma2);
    }
    const double sur_se_nats =
        g_nats - linearized_interference(f_anchor, d, x, anchor);
    const double pref = 1.0 / total_power(x, p) + p.beta / budget_power(p);
    CHECK(pref * sur_se_nats <=
          pref * true_se_nats + 1e-9 * std::max(1.0, std::abs(true_se_nats)));
  }
}

TEST_CASE("mm_solve on a dead channel converges immediately to zero") {
  SystemParams p = desk_params(4, 2, 1);
  ChannelStats stats;
  stats.omega = {Eigen::MatrixXd::Zero(1, 4), Eigen::MatrixXd::Zero(1, 4)};
  SolverConfig cfg;
  const MmState st = mm_solve(stats, p, cfg);
  CHECK(st.converged);
  CHECK(st.ell == 1);
  CHECK(st.alloc.total() == 0.0);
  CHECK(st.re_trace.back() == 0.0);
}

TEST_CASE("mm_solve rejects an infeasible start") {
  SolverConfig cfg;
  const Instance in = make_instance(4, 2, 1, 94);
  CHECK_THROWS_AS(
      mm_solve(in.stats, in.params, cfg,
               PowerAllocation::uniform(in.params, 2.0 * in.params.Pmax)),
      std::invalid_argument);
}

TEST_CASE("mm_solve monotone trace, feasible iterates, convergence") {
  SolverConfig cfg;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = make_instance(8, 3, 2, 700 + seed);
    const MmState st = mm_solve(in.stats, in.params, cfg);
    CHECK(st.converged);
    CHECK(st.ell <= cfg.max_mm_iter);
    for (std::size_t i = 1; i < st.re_trace.size(); ++i)
      CHECK(st.re_trace[i] >= st.re_trace[i - 1] - 1e-9);
    CHECK(st.alloc.total() <= in.params.Pmax + 1e-9);
    for (const auto& lam : st.alloc.lambda) CHECK((lam.array() >= 0).all());
  }
}

TEST_CASE("mm_solve converges fast at low budget") {
  SolverConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance in = make_instance(8, 2, 2, 800 + seed, /*pmax=*/0.05);
    const MmState st = mm_solve(in.stats, in.params, cfg);
    CHECK(st.converged);
    CHECK(st.ell <= 3);
  }
}

TEST_CASE("mm_solve reaches the brute-force optimum on tiny instances") {
  SolverConfig cfg;
  const Instance in = make_instance(2, 2, 1, 95, /*pmax=*/50.0);
  const auto [grid_alloc, grid_re] =
      grid_search_re(in.stats, in.params, cfg, 25);
  const MmState st = mm_solve(in.stats, in.params, cfg);
  CHECK(st.re_trace.back() >= grid_re * (1.0 - 1e-3));
}
