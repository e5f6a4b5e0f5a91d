#pragma once

#include <cstdint>

namespace beamre {

/// All tolerances, step sizes, iteration caps, seeds and sample counts.
/// eps2 and eps5 are scale factors: the outer power search stops at
/// |dP_T| <= eps2 * Pmax, the water-filling power balance at
/// |sum - P_T| <= eps5 * max(P_T, 1).
struct SolverConfig {
  double eps1 = 1e-8;    ///< DE fixed-point tolerance (max-abs change)
  double eps2 = 1e-6;    ///< outer P_T search tolerance, relative to Pmax
  double eps3 = 1e-6;    ///< MM stop: absolute change of the DE-RE value
  double eps4 = 1e-10;   ///< per-beam Newton tolerance (absolute)
  double eps5 = 1e-8;    ///< power-balance tolerance, relative to max(P_T,1)
  double step_scale = 0.1;  ///< outer gradient step as a fraction of Pmax

  int max_mm_iter = 50;
  int max_fp_iter = 1000;
  int max_newton_iter = 50;
  int max_bisect_iter = 200;
  int mc_samples = 1000;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

}  // namespace beamre
