#pragma once

#include <string>
#include <vector>

#include "beamre/config.hpp"
#include "beamre/mm.hpp"
#include "beamre/rates.hpp"

namespace beamre {

/// Channel for an experiment: loads the coupling file when one is named,
/// otherwise synthesizes deterministically from the config seed.
ChannelStats experiment_channel(const ExperimentConfig& cfg);

/// Run the configured sweep; one CSV per sweep plus a run manifest, all
/// under cfg.out_dir. Sweep points execute on a worker pool with derived
/// per-point seeds; rows are written in sweep order. Returns file paths.
std::vector<std::string> run_sweep(const ExperimentConfig& cfg);

struct SolveOutput {
  PowerAllocation alloc;
  MetricsReport de;
  MetricsReport mc;
  int mm_iters = 0;
  bool converged = false;
  std::string alloc_path;
  std::string metrics_path;
};

/// Single solve: writes the final allocation (K rows x M columns, watts)
/// and a one-row metrics CSV with DE and Monte-Carlo numbers.
SolveOutput solve_once(const ExperimentConfig& cfg);

struct VerifyRow {
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  std::string status;  // pass | fail | skipped
};

/// Run the oracle suites sized for the configured instance and write a
/// pass/fail CSV. Oversized checks are reported as skipped, not fatal.
std::vector<VerifyRow> verify(const ExperimentConfig& cfg);

/// Effective worker count: BEAMRE_THREADS overrides the configured value.
int effective_threads(const ExperimentConfig& cfg);

/// 17-significant-digit float formatting used in every CSV.
std::string csv_num(double v);

}  // namespace beamre
