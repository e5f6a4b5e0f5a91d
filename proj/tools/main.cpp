// beamre: resource-efficiency-optimal beam-domain power allocation for the
// massive MIMO downlink, driven by statistical CSI only.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "beamre/channel.hpp"
#include "beamre/config.hpp"
#include "beamre/experiment.hpp"
#include "beamre/rng.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (key = value)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "seed (overrides config)");
  cmd->add_option("--threads", opts.threads,
                  "worker threads (overrides config; BEAMRE_THREADS wins)");
}

beamre::ExperimentConfig load(const CommonOpts& opts) {
  beamre::ExperimentConfig cfg = beamre::parse_config_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(opts.seed);
    cfg.solver.seed = cfg.seed;
  }
  if (opts.threads >= 1) cfg.threads = opts.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beam-domain power allocation for massive MIMO downlink"};
  app.require_subcommand(1);

  CommonOpts solve_opts, sweep_opts, verify_opts, gen_opts;
  CLI::App* solve = app.add_subcommand("solve", "single solve: allocation + metrics");
  add_common(solve, solve_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured sweep to CSV");
  add_common(sweep, sweep_opts);
  CLI::App* verify = app.add_subcommand("verify", "run oracle cross-checks");
  add_common(verify, verify_opts);
  CLI::App* gen = app.add_subcommand("gen-channel", "write the coupling matrices");
  add_common(gen, gen_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const auto cfg = load(solve_opts);
      const auto out = beamre::solve_once(cfg);
      std::printf("wrote %s\n", out.alloc_path.c_str());
      std::printf("wrote %s\n", out.metrics_path.c_str());
      std::printf("se_de=%.6g bits/s/Hz ee_de=%.6g bits/J re_de=%.6g bits/J/Hz (%s)\n",
                  out.de.se, out.de.ee, out.de.re,
                  out.converged ? "converged" : "maxiter");
      return 0;
    }
    if (sweep->parsed()) {
      const auto cfg = load(sweep_opts);
      for (const auto& f : beamre::run_sweep(cfg))
        std::printf("wrote %s\n", f.c_str());
      return 0;
    }
    if (verify->parsed()) {
      const auto cfg = load(verify_opts);
      bool ok = true;
      for (const auto& r : beamre::verify(cfg)) {
        std::printf("%-28s %-8s value=%.3g bound=%.3g\n", r.check.c_str(),
                    r.status.c_str(), r.value, r.bound);
        if (r.status == "fail") ok = false;
      }
      return ok ? 0 : 1;
    }
    if (gen->parsed()) {
      const auto cfg = load(gen_opts);
      const auto stats = beamre::experiment_channel(cfg);
      std::filesystem::create_directories(cfg.out_dir);
      const std::string path =
          (std::filesystem::path(cfg.out_dir) / "omega.txt").string();
      beamre::save_omega_file(path, stats);
      std::printf("wrote %s\n", path.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
