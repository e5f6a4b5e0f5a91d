#include "beamre/de.hpp"

#include <cmath>
#include <stdexcept>

#include "beamre/rates.hpp"

namespace beamre {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

DeState de_fixed_point(const ChannelStats& stats, const PowerAllocation& alloc,
                       int k, double sigma2, double eps1, int max_iter,
                       const Eigen::VectorXd* phi_tilde_init) {
  if (!(eps1 > 0)) throw std::invalid_argument("eps1 must be > 0");
  const auto& omega = stats.omega[k];
  const Eigen::Index nk = omega.rows();
  const Eigen::VectorXd& lam = alloc.lambda[k];
  const Eigen::VectorXd kbar = interference_floor(stats, alloc, k, sigma2);

  DeState st;
  st.phi_tilde =
      phi_tilde_init ? *phi_tilde_init : Eigen::VectorXd::Ones(nk);

  for (int it = 0; it < max_iter; ++it) {
    // phi from phi_tilde, then the phi_tilde update
    const Eigen::VectorXd w = (st.phi_tilde.array() * kbar.array()).inverse();
    st.gamma = omega.transpose() * w;
    st.phi = (st.gamma.array() * lam.array() + 1.0).matrix();
    st.gamma_tilde = omega * (lam.array() / st.phi.array()).matrix();
    const Eigen::VectorXd next =
        (st.gamma_tilde.array() / kbar.array() + 1.0).matrix();

    const double delta = (next - st.phi_tilde).cwiseAbs().maxCoeff();
    st.phi_tilde = next;
    st.iterations = it + 1;
    if (delta <= eps1) {
      st.converged = true;
      break;
    }
  }
  // gammas consistent with the final phi_tilde
  const Eigen::VectorXd w = (st.phi_tilde.array() * kbar.array()).inverse();
  st.gamma = omega.transpose() * w;
  st.phi = (st.gamma.array() * lam.array() + 1.0).matrix();
  st.gamma_tilde = omega * (lam.array() / st.phi.array()).matrix();
  return st;
}

double de_rate(const DeState& state, const PowerAllocation& alloc, int k,
               const ChannelStats& stats, double sigma2) {
  if (!state.converged)
    throw std::runtime_error("de_rate: fixed point did not converge");
  const Eigen::VectorXd kbar = interference_floor(stats, alloc, k, sigma2);
  const Eigen::VectorXd& lam = alloc.lambda[k];

  const double signal =
      (state.gamma.array() * lam.array()).log1p().sum();
  const double cross =
      ((state.gamma_tilde.array() + kbar.array()) / kbar.array()).log().sum();
  const double trace = (1.0 - state.phi_tilde.array().inverse()).sum();
  return (signal + cross - trace) / kLn2;
}

double interference_lndet(const ChannelStats& stats,
                          const PowerAllocation& alloc, int k, double sigma2) {
  return interference_floor(stats, alloc, k, sigma2).array().log().sum();
}

double de_re(const ChannelStats& stats, const PowerAllocation& alloc,
             const SystemParams& params, const SolverConfig& cfg) {
  double se = 0.0;
  for (int k = 0; k < params.K; ++k) {
    const DeState st = de_fixed_point(stats, alloc, k, params.sigma2, cfg.eps1,
                                      cfg.max_fp_iter);
    se += de_rate(st, alloc, k, stats, params.sigma2);
  }
  return (1.0 / total_power(alloc, params) +
          params.beta / budget_power(params)) *
         se;
}

std::vector<DeState> de_states_all(const ChannelStats& stats,
                                   const PowerAllocation& alloc,
                                   const SystemParams& params,
                                   const SolverConfig& cfg) {
  std::vector<DeState> states;
  states.reserve(params.K);
  for (int k = 0; k < params.K; ++k)
    states.push_back(de_fixed_point(stats, alloc, k, params.sigma2, cfg.eps1,
                                    cfg.max_fp_iter));
  return states;
}

}  // namespace beamre
