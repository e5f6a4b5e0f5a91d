#pragma once

#include <vector>

#include "beamre/model.hpp"
#include "beamre/solver_config.hpp"

namespace beamre {

/// Deterministic-equivalent auxiliaries of one UT. All matrices involved are
/// diagonal, so only the diagonals are stored. phi and phi_tilde are each
/// 1 plus a nonnegative term, hence entrywise >= 1.
struct DeState {
  Eigen::VectorXd phi_tilde;    ///< length N_k, >= 1
  Eigen::VectorXd phi;          ///< length M, >= 1
  Eigen::VectorXd gamma;        ///< length M, >= 0 (effective per-beam gain)
  Eigen::VectorXd gamma_tilde;  ///< length N_k, >= 0
  bool converged = false;
  int iterations = 0;
};

/// Solve the DE fixed point of UT k at the given allocation. Starts from
/// phi_tilde = 1 (exact at lambda_k = 0) unless an initial vector is given;
/// stops when the max-abs change of phi_tilde drops to eps1. A state with
/// converged == false carries the last iterate.
DeState de_fixed_point(const ChannelStats& stats, const PowerAllocation& alloc,
                       int k, double sigma2, double eps1, int max_iter,
                       const Eigen::VectorXd* phi_tilde_init = nullptr);

/// DE of the rate of UT k [bits/s/Hz]: the asymptotic log-det expression
/// minus the interference baseline. Throws if the state is not converged.
double de_rate(const DeState& state, const PowerAllocation& alloc, int k,
               const ChannelStats& stats, double sigma2);

/// Interference log-det term of UT k in nats: sum_n ln(sigma2 + cross power).
double interference_lndet(const ChannelStats& stats,
                          const PowerAllocation& alloc, int k, double sigma2);

/// DE-based resource efficiency [bits/Joule/Hz] at an allocation, computing
/// fresh DE states for every UT:
/// (1/P_sum + beta/P_tot) * sum_k rate_k.
double de_re(const ChannelStats& stats, const PowerAllocation& alloc,
             const SystemParams& params, const SolverConfig& cfg);

/// DE states for all UTs at one allocation.
std::vector<DeState> de_states_all(const ChannelStats& stats,
                                   const PowerAllocation& alloc,
                                   const SystemParams& params,
                                   const SolverConfig& cfg);

}  // namespace beamre
