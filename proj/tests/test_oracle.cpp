#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamre/mm.hpp"
#include "beamre/oracle.hpp"
#include "beamre/powerctl.hpp"
#include "helpers.hpp"

using namespace beamre;
using namespace beamre::testing;

TEST_CASE("capped simplex projection") {
  Eigen::VectorXd z(3);
  z << 0.2, -0.1, 0.3;
  // already inside: clip negatives only
  const Eigen::VectorXd y = project_capped_simplex(z, 1.0);
  CHECK(y[0] == doctest::Approx(0.2));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(0.3));

  // outside: lands on the simplex
  Eigen::VectorXd z2(3);
  z2 << 2.0, 1.0, 0.0;
  const Eigen::VectorXd y2 = project_capped_simplex(z2, 1.0);
  CHECK(y2.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((y2.array() >= 0).all());
  CHECK(y2[0] == doctest::Approx(1.0));
  CHECK(y2[1] == doctest::Approx(0.0));

  // projection is idempotent and never increases distance
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = 4.0 * rng.uniform() - 1.0;
    const Eigen::VectorXd p1 = project_capped_simplex(v, 2.0);
    CHECK(p1.sum() <= 2.0 + 1e-12);
    CHECK((p1.array() >= -1e-15).all());
    CHECK(project_capped_simplex(p1, 2.0).isApprox(p1, 1e-12));
  }
}

TEST_CASE("fd_gap on exact derivatives") {
  // linear map: central differences are exact
  const auto lin = [](double x) { return 3.0 * x - 2.0; };
  CHECK(fd_gap(lin, 3.0, 0.7, 1e-4) <= 1e-12);

  const auto quad = [](double x) { return x * x; };
  CHECK(fd_gap(quad, 2.0 * 1.5, 1.5, 1e-5) <= 1e-8);

  CHECK_THROWS_AS(fd_gap(lin, 3.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("grid search basics") {
  SolverConfig cfg;

  // zero channel: zero allocation, RE 0
  SystemParams p = desk_params(1, 2, 1, 1.0);
  ChannelStats dead;
  dead.omega = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
  const auto [alloc0, re0] = grid_search_re(dead, p, cfg, 5);
  CHECK(re0 == 0.0);
  CHECK(alloc0.total() == 0.0);

  // dimensionality cap and grid size validation
  const Instance big = make_instance(4, 2, 1, 1);
  CHECK_THROWS_AS(grid_search_re(big.stats, big.params, cfg, 5),
                  std::invalid_argument);
  const Instance ok = make_instance(2, 2, 1, 1);
  CHECK_THROWS_AS(grid_search_re(ok.stats, ok.params, cfg, 1),
                  std::invalid_argument);
}

TEST_CASE("1-D grid scan agrees with the two-layer search") {
  SolverConfig cfg;
  const Instance in = make_instance(1, 1, 1, 12, /*pmax=*/100.0);
  const auto [galloc, gre] = grid_search_re(in.stats, in.params, cfg, 201);

  const MmState st = mm_solve(in.stats, in.params, cfg);
  const double spacing = in.params.Pmax / 200.0;
  CHECK(std::abs(st.alloc.total() - galloc.total()) <= spacing);
  CHECK(st.re_trace.back() >= gre - 1e-6);
}

TEST_CASE("projected gradient solves the single-user closed form") {
  ChannelStats stats;
  stats.omega = {Eigen::MatrixXd::Zero(1, 2)};
  Surrogate sur;
  sur.sigma2 = 1.0;
  Eigen::VectorXd gamma(2);
  gamma << 4.0, 1.0;
  sur.gamma = {gamma};
  sur.gamma_tilde = {Eigen::VectorXd::Zero(1)};
  sur.d = {Eigen::VectorXd::Zero(2)};
  sur.trace_const = {0.0};
  sur.anchor.lambda = {Eigen::VectorXd::Zero(2)};
  sur.f_anchor = 0.0;

  const auto [alloc, obj] = projected_gradient_inner(stats, sur, 1.0);
  CHECK(alloc.lambda[0][0] == doctest::Approx(0.875).epsilon(1e-5));
  CHECK(alloc.lambda[0][1] == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(obj == doctest::Approx(std::log(4.5) + std::log(1.125)).epsilon(1e-9));

  const auto [zalloc, zobj] = projected_gradient_inner(stats, sur, 0.0);
  CHECK(zalloc.total() == 0.0);
  CHECK(zobj == doctest::Approx(0.0));
}

TEST_CASE("projected gradient and waterfill agree on random instances") {
  SolverConfig cfg;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = make_instance(3, 2, 2, 1000 + seed);
    const Surrogate sur = anchored_surrogate(in, cfg, in.params.Pmax);
    const double pt = in.params.Pmax * (0.15 + 0.04 * seed);

    const WaterfillResult wf = waterfill(in.stats, sur, pt, cfg);
    const auto [ref_alloc, ref_obj] = projected_gradient_inner(in.stats, sur, pt);
    REQUIRE(wf.converged);
    CHECK(std::abs(wf.se_nats - ref_obj) /
              std::max(std::abs(ref_obj), 1e-12) <=
          1e-5);
  }
}

TEST_CASE("de_vs_mc_report") {
  SolverConfig cfg;
  const Instance in = make_instance(16, 2, 2, 44);
  const PowerAllocation zero = PowerAllocation::zeros(in.params);
  const OracleReport rep0 = de_vs_mc_report(in.stats, zero, in.params, 200, 3);
  CHECK(rep0.gap == 0.0);  // both rates are exactly zero

  CHECK_THROWS_AS(de_vs_mc_report(in.stats, zero, in.params, 50, 3),
                  std::invalid_argument);

  const PowerAllocation full =
      PowerAllocation::uniform(in.params, in.params.Pmax);
  const OracleReport rep =
      de_vs_mc_report(in.stats, full, in.params, 1000, 3);
  CHECK(rep.gap >= 0.0);
  CHECK(rep.details.count("se_de") == 1);
  CHECK(rep.details.at("se_de") > 0.0);
}
