#pragma once

#include <cstdint>
#include <vector>

#include "beamre/model.hpp"

namespace beamre {

/// Received power per rx eigen-direction given per-beam powers:
/// out[n] = sum_m omega(n,m) * beam_power[m].
Eigen::VectorXd coupled_rx_power(const Eigen::MatrixXd& omega,
                                 const Eigen::VectorXd& beam_power);

/// Aggregate per-beam weight given per-rx-direction weights:
/// out[m] = sum_n omega(n,m) * rx_weight[n].
Eigen::VectorXd coupled_beam_gain(const Eigen::MatrixXd& omega,
                                  const Eigen::VectorXd& rx_weight);

/// Diagonal of the deterministic interference-plus-noise covariance of UT k:
/// sigma2 + sum_{i != k} coupled_rx_power(omega_k, lambda_i).
Eigen::VectorXd interference_floor(const ChannelStats& stats,
                                   const PowerAllocation& alloc, int k,
                                   double sigma2);

/// Monte-Carlo ergodic rate of UT k [bits/s/Hz] with the exact per-sample
/// interference covariance. Deterministic given seed.
double mc_rate_exact(const ChannelStats& stats, const PowerAllocation& alloc,
                     int k, double sigma2, int n_samples, std::uint64_t seed);

/// Monte-Carlo rate of UT k [bits/s/Hz] with the interference covariance
/// replaced by its deterministic diagonal (interference_floor).
double mc_rate_approx(const ChannelStats& stats, const PowerAllocation& alloc,
                      int k, double sigma2, int n_samples, std::uint64_t seed);

enum class RateModel { kExact, kApprox, kDeterministic };

struct MetricsReport {
  double se = 0.0;     ///< sum rate [bits/s/Hz]
  double ee = 0.0;     ///< W * se / p_sum [bits/Joule]
  double re = 0.0;     ///< ee/W + beta * se / P_tot [bits/Joule/Hz]
  double p_sum = 0.0;  ///< consumed power [W]
  std::vector<double> per_user_rates;
};

/// Assemble SE / EE / RE for an allocation. `n_samples` and `seed` are used
/// only by the Monte-Carlo rate models.
MetricsReport metrics(const ChannelStats& stats, const PowerAllocation& alloc,
                      const SystemParams& params, RateModel model,
                      int n_samples, std::uint64_t seed);

}  // namespace beamre
