#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "beamre/model.hpp"
#include "beamre/solver_config.hpp"
#include "beamre/surrogate.hpp"

namespace beamre {

struct OracleReport {
  enum class Kind { kGrid, kRefSolver, kFd, kDeVsMc };
  Kind kind = Kind::kFd;
  double gap = 0.0;  ///< relative difference, >= 0
  std::map<std::string, double> details;
};

/// Exhaustive scan of the box-simplex {lambda >= 0, sum <= Pmax} on a
/// uniform per-dimension grid, evaluating the DE-RE objective. Global
/// reference at tiny scale; rejects instances with K*M > 6.
std::pair<PowerAllocation, double> grid_search_re(const ChannelStats& stats,
                                                  const SystemParams& params,
                                                  const SolverConfig& cfg,
                                                  int grid_points_per_dim);

/// Projected gradient ascent on the concave surrogate over
/// {lambda >= 0, sum <= P_T} with exact simplex projection, run to a 1e-9
/// objective stall. Independent of the water-filling code path.
/// Returns the allocation and the surrogate SE in nats.
std::pair<PowerAllocation, double> projected_gradient_inner(
    const ChannelStats& stats, const Surrogate& sur, double p_t);

/// Euclidean projection onto {x >= 0, sum x <= total}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& z, double total);

/// Relative gap between `analytic` and the central difference of f at x0.
double fd_gap(const std::function<double(double)>& f, double analytic,
              double x0, double delta);

/// Per-UT and aggregate relative gap between the DE rate and the
/// Monte-Carlo estimate of the approximated rate.
OracleReport de_vs_mc_report(const ChannelStats& stats,
                             const PowerAllocation& alloc,
                             const SystemParams& params, int n_samples,
                             std::uint64_t seed);

}  // namespace beamre
