#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "beamre/config.hpp"

using namespace beamre;

namespace {

const char* kBaseConfig = R"(# minimal experiment
M = 8
K = 2
N = 2
W = 1e7
sigma2 = -105 dBm
xi = 5
Pc = 30 dBm
Ps = 40 dBm
Pmax = 40 dBm
beta = 0.5
)";

}  // namespace

TEST_CASE("parse applies unit conversion and defaults") {
  const ExperimentConfig c = parse_config(kBaseConfig);
  CHECK(c.params.M == 8);
  CHECK(c.params.K == 2);
  CHECK(c.params.N == std::vector<int>{2, 2});
  CHECK(c.params.Pc == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.params.Ps == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(c.params.Pmax == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(c.params.sigma2 ==
        doctest::Approx(3.1622776601683794e-14).epsilon(1e-12));
  CHECK(c.params.beta == 0.5);
  // solver defaults
  CHECK(c.solver.eps1 == 1e-8);
  CHECK(c.solver.eps3 == 1e-6);
  CHECK(c.solver.max_mm_iter == 50);
  CHECK(c.sweep == SweepKind::kNone);
}

TEST_CASE("watt values pass through") {
  std::string text = kBaseConfig;
  text += "out_dir = /tmp/x\n";
  ExperimentConfig c = parse_config(text);
  CHECK(c.out_dir == "/tmp/x");

  std::string text2 = kBaseConfig;
  text2.replace(text2.find("Pc = 30 dBm"), 11, "Pc = 2.5 W ");
  c = parse_config(text2);
  CHECK(c.params.Pc == 2.5);
}

TEST_CASE("errors carry the key and line number") {
  // missing required key
  std::string text = kBaseConfig;
  text.erase(text.find("M = 8\n"), 6);
  try {
    parse_config(text);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("'M'") != std::string::npos);
  }

  // unknown key with its line number
  text = kBaseConfig;
  text += "bogus_key = 3\n";
  try {
    parse_config(text);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus_key") != std::string::npos);
    CHECK(msg.find("line") != std::string::npos);
  }

  // malformed value
  text = kBaseConfig;
  text.replace(text.find("xi = 5"), 6, "xi = x");
  CHECK_THROWS_AS(parse_config(text), std::invalid_argument);

  // bad unit
  text = kBaseConfig;
  text.replace(text.find("Pc = 30 dBm"), 11, "Pc = 30 dBW");
  CHECK_THROWS_AS(parse_config(text), std::invalid_argument);

  // duplicate key
  text = kBaseConfig;
  text += "M = 9\n";
  CHECK_THROWS_AS(parse_config(text), std::invalid_argument);
}

TEST_CASE("sweep configuration") {
  std::string text = kBaseConfig;
  text += "sweep = pmax\nsweep_start = 30 dBm\nsweep_stop = 50\nsweep_step = 5\n";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.sweep == SweepKind::kPmax);
  CHECK(c.sweep_start == 30.0);
  CHECK(c.sweep_stop == 50.0);
  CHECK(c.sweep_step == 5.0);

  // missing bounds for a ranged sweep
  std::string bad = kBaseConfig;
  bad += "sweep = beta\n";
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);

  // empty range
  bad = kBaseConfig;
  bad += "sweep = beta\nsweep_start = 2\nsweep_stop = 1\nsweep_step = 1\n";
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);

  // unknown sweep kind
  bad = kBaseConfig;
  bad += "sweep = banana\n";
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}

TEST_CASE("render / parse round trip") {
  std::string text = kBaseConfig;
  text +=
      "sweep = pmax\nsweep_start = 30\nsweep_stop = 50\nsweep_step = 2.5\n"
      "seed = 7\nthreads = 4\nout_dir = results\n"
      "pathloss_db = -117.5\nsupport_fraction = 0.625\ndecay = 0.2\n"
      "eps3 = 2e-7\nmc_samples = 512\nmultistart_count = 6\n";
  const ExperimentConfig c = parse_config(text);
  const ExperimentConfig c2 = parse_config(render_config(c));
  CHECK(c == c2);

  // a second round trip is byte-stable
  CHECK(render_config(c) == render_config(c2));
}
