#include "beamre/surrogate.hpp"

#include "beamre/rates.hpp"

namespace beamre {

std::vector<Eigen::VectorXd> interference_gradient(
    const ChannelStats& stats, const PowerAllocation& alloc, double sigma2) {
  const int K = static_cast<int>(stats.omega.size());
  const Eigen::Index M = stats.omega[0].cols();

  // contribution of each UT's own floor, then subtract it from the total
  std::vector<Eigen::VectorXd> own(K);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(M);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd inv_floor =
        interference_floor(stats, alloc, k, sigma2).array().inverse();
    own[k] = stats.omega[k].transpose() * inv_floor;
    total += own[k];
  }
  std::vector<Eigen::VectorXd> d(K);
  for (int k = 0; k < K; ++k) d[k] = total - own[k];
  return d;
}

double linearized_interference(double f_anchor,
                               const std::vector<Eigen::VectorXd>& d,
                               const PowerAllocation& alloc,
                               const PowerAllocation& anchor) {
  double v = f_anchor;
  for (std::size_t k = 0; k < d.size(); ++k)
    v += d[k].dot(alloc.lambda[k] - anchor.lambda[k]);
  return v;
}

double Surrogate::se_nats(const ChannelStats& stats,
                          const PowerAllocation& alloc) const {
  const int K = static_cast<int>(gamma.size());
  double se = 0.0;
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd kbar =
        interference_floor(stats, alloc, k, sigma2);
    se += (gamma[k].array() * alloc.lambda[k].array()).log1p().sum();
    se += ((gamma_tilde[k].array() + kbar.array()) ).log().sum();
    se -= trace_const[k];
  }
  return se - linearized_interference(f_anchor, d, alloc, anchor);
}

Surrogate make_surrogate(const ChannelStats& stats,
                         const PowerAllocation& anchor,
                         const SystemParams& params,
                         const std::vector<DeState>& states) {
  Surrogate s;
  s.sigma2 = params.sigma2;
  s.anchor = anchor;
  s.d = interference_gradient(stats, anchor, params.sigma2);
  for (int k = 0; k < params.K; ++k) {
    s.gamma.push_back(states[k].gamma);
    s.gamma_tilde.push_back(states[k].gamma_tilde);
    s.trace_const.push_back(
        (1.0 - states[k].phi_tilde.array().inverse()).sum());
    s.f_anchor += interference_lndet(stats, anchor, k, params.sigma2);
  }
  return s;
}

}  // namespace beamre
