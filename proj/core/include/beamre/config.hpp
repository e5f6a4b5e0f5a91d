#pragma once

#include <cstdint>
#include <string>

#include "beamre/model.hpp"
#include "beamre/solver_config.hpp"

namespace beamre {

enum class SweepKind {
  kNone,
  kPmax,
  kBeta,
  kTradeoff,
  kConvergence,
  kMultistart,
  kRateCompare
};

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& s);  // throws on unknown

/// Channel source: a coupling file wins over the synthetic generator.
struct ChannelConfig {
  std::string omega_file;
  double pathloss_db = -120.0;
  double support_fraction = 1.0;
  double decay = 0.0;
  double jitter = 0.5;

  bool operator==(const ChannelConfig&) const = default;
};

struct ExperimentConfig {
  SystemParams params;
  ChannelConfig channel;
  SolverConfig solver;

  SweepKind sweep = SweepKind::kNone;
  // pmax-style sweeps are bounded in dBm with a dB step; beta sweeps are
  // plain numbers
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  double sweep_step = 1.0;
  int multistart_count = 10;

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
};

/// Parse a flat `key = value` config ('#' comments, blank lines allowed).
/// Power values accept a `dBm` or `W` unit suffix. Errors carry the line
/// number and the offending key.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig parse_config_file(const std::string& path);

/// Serialize so that parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& c);

bool operator==(const SystemParams& a, const SystemParams& b);
bool operator==(const SolverConfig& a, const SolverConfig& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace beamre
