#pragma once

#include <vector>

#include "beamre/model.hpp"
#include "beamre/powerctl.hpp"
#include "beamre/solver_config.hpp"
#include "beamre/surrogate.hpp"

namespace beamre {

struct MmState {
  int ell = 0;                      ///< number of completed MM updates
  PowerAllocation alloc;            ///< final allocation
  std::vector<Eigen::VectorXd> d;   ///< interference gradient at last anchor
  std::vector<double> re_trace;     ///< DE-RE per iterate [bits/J/Hz]
  bool converged = false;
  bool inner_ok = true;             ///< all inner solves converged
};

/// Outer MM loop: at each anchor, refresh the DE states, build the concave
/// surrogate (frozen gammas + linearized interference), maximize it with the
/// two-layer power search, and accept the maximizer. Stops when the DE-RE
/// value changes by at most eps3.
MmState mm_solve(const ChannelStats& stats, const SystemParams& params,
                 const SolverConfig& cfg, const PowerAllocation& init);

/// mm_solve from the default start: uniform allocation at full budget.
MmState mm_solve(const ChannelStats& stats, const SystemParams& params,
                 const SolverConfig& cfg);

}  // namespace beamre
