#pragma once

#include <vector>

#include "beamre/de.hpp"
#include "beamre/model.hpp"

namespace beamre {

/// Gradient of the summed interference log-det term with respect to each
/// UT's beam powers, in nats/W: one length-M vector per UT,
/// d_k[t] = sum_{k' != k} sum_n omega_k'(n,t) / floor_k'(n).
std::vector<Eigen::VectorXd> interference_gradient(
    const ChannelStats& stats, const PowerAllocation& alloc, double sigma2);

/// First-order expansion of the summed interference term around an anchor
/// (nats): f_anchor + sum_k d_k . (lambda_k - anchor_k). Upper-bounds the
/// true concave term everywhere, with equality at the anchor.
double linearized_interference(double f_anchor,
                               const std::vector<Eigen::VectorXd>& d,
                               const PowerAllocation& alloc,
                               const PowerAllocation& anchor);

/// Concave model of the DE sum rate built at one MM anchor: the DE gammas
/// are frozen at the anchor and the interference term is linearized there.
/// At the anchor it coincides with the true DE objective.
struct Surrogate {
  std::vector<Eigen::VectorXd> gamma;        ///< per UT, length M (nats)
  std::vector<Eigen::VectorXd> gamma_tilde;  ///< per UT, length N_k
  std::vector<Eigen::VectorXd> d;            ///< per UT, length M (nats/W)
  std::vector<double> trace_const;           ///< per UT (nats)
  PowerAllocation anchor;
  double f_anchor = 0.0;  ///< summed interference term at the anchor (nats)
  double sigma2 = 0.0;

  /// Surrogate sum rate at an allocation (nats/s/Hz).
  double se_nats(const ChannelStats& stats,
                 const PowerAllocation& alloc) const;
};

Surrogate make_surrogate(const ChannelStats& stats,
                         const PowerAllocation& anchor,
                         const SystemParams& params,
                         const std::vector<DeState>& states);

}  // namespace beamre
