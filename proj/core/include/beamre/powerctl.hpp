#pragma once

#include <vector>

#include "beamre/model.hpp"
#include "beamre/solver_config.hpp"
#include "beamre/surrogate.hpp"

namespace beamre {

/// Marginal utility (nats/W) of setting beam (k,m) to `xbar` while every
/// other beam keeps the power in `x`, minus the water level `mu`. The root
/// in xbar is the beam's optimal power; the function is strictly decreasing
/// where the beam has any gain.
double marginal_utility(const ChannelStats& stats, const Surrogate& sur,
                        const PowerAllocation& x, int k, int m, double xbar,
                        double mu);

/// Exact derivative of marginal_utility with respect to xbar; always <= 0.
double marginal_utility_deriv(const ChannelStats& stats, const Surrogate& sur,
                              const PowerAllocation& x, int k, int m,
                              double xbar);

/// Upper bound on the water level: the largest marginal utility of any beam
/// at zero power. Above it every beam shuts off.
double water_level_upper_bound(const ChannelStats& stats,
                               const Surrogate& sur);

struct WaterfillResult {
  PowerAllocation alloc;
  double mu_star = 0.0;      ///< water level = d(SE)/dP_T [nats/W]
  double se_value = 0.0;     ///< surrogate SE at the solution [bits/s/Hz]
  double se_nats = 0.0;      ///< same, in nats
  double kkt_residual = 0.0; ///< max stationarity violation over beams
  bool converged = false;
  bool saturated = false;    ///< optimum uses less than P_T (mu_star = 0)
  int bisect_iters = 0;
  /// Surrogate with the gammas refreshed at the solution; the KKT
  /// conditions hold with these, not with the anchor gammas.
  Surrogate consistent;
};

/// Multi-user iterative water-filling: a safeguarded-secant search for the
/// water level wrapping Gauss-Seidel Newton sweeps over beams. The DE
/// gammas are re-solved at each inner solution (Anderson-accelerated) until
/// the allocation is a fixed point, so the returned value and multiplier
/// belong to the exact concave inner problem (gammas at the optimum). UTs
/// with an all-zero coupling matrix keep the caller-provided gammas.
/// `warm` optionally seeds the search from a neighboring solution.
WaterfillResult waterfill(const ChannelStats& stats, const Surrogate& sur,
                          double p_t, const SolverConfig& cfg,
                          const WaterfillResult* warm = nullptr);

/// Derivative of the surrogate RE with respect to P_T. `se` and `dse_dpt`
/// must share one rate unit (per-nat internally); the result is in the same
/// unit per watt.
double re_power_derivative(double p_t, double se, double dse_dpt,
                           const SystemParams& params);

struct PtPoint {
  double p_t;    ///< transmit power [W]
  double re;     ///< surrogate RE [bits/J/Hz]
  double dre;    ///< derivative [bits/J/Hz/W]
};

struct PtSearchResult {
  double p_opt = 0.0;        ///< optimizer of the surrogate RE in [0, Pmax]
  double re_value = 0.0;     ///< surrogate RE at p_opt [bits/J/Hz]
  std::vector<PtPoint> trace;
  WaterfillResult best;      ///< water-filling solution at p_opt
  bool converged = false;
  bool stalled = false;      ///< stopped on step underflow
};

/// Derivative-assisted gradient search over the total transmit power,
/// exploiting strict quasi-concavity of the surrogate RE. Starts at Pmax/2
/// with a step normalized by the initial derivative and halves the step
/// whenever the objective decreases.
PtSearchResult search_transmit_power(const ChannelStats& stats,
                                     const Surrogate& sur,
                                     const SystemParams& params,
                                     const SolverConfig& cfg);

}  // namespace beamre
