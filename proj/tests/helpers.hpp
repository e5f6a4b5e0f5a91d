#pragma once

// shared fixtures for the solver tests

#include <cstdint>

#include "beamre/channel.hpp"
#include "beamre/de.hpp"
#include "beamre/model.hpp"
#include "beamre/rng.hpp"
#include "beamre/surrogate.hpp"

namespace beamre::testing {

inline SystemParams desk_params(int m, int k, int n, double pmax_w = 10.0,
                                double beta = 0.5) {
  SystemParams p;
  p.M = m;
  p.K = k;
  p.N.assign(k, n);
  p.W = 1e7;
  p.sigma2 = dbm_to_watt(-105.0);
  p.xi = 5.0;
  p.Pc = dbm_to_watt(30.0);
  p.Ps = dbm_to_watt(40.0);
  p.Pmax = pmax_w;
  p.beta = beta;
  return p;
}

struct Instance {
  SystemParams params;
  ChannelStats stats;
};

inline Instance make_instance(int m, int k, int n, std::uint64_t seed,
                              double pmax_w = 10.0, double beta = 0.5,
                              double support = 0.6, double decay = 0.15) {
  Instance in;
  in.params = desk_params(m, k, n, pmax_w, beta);
  in.stats = synth_coupling(in.params, -120.0, support, decay, seed, 0.5);
  return in;
}

// surrogate anchored at the uniform full-budget allocation
inline Surrogate anchored_surrogate(const Instance& in,
                                    const SolverConfig& cfg,
                                    double anchor_total) {
  const PowerAllocation anchor =
      PowerAllocation::uniform(in.params, anchor_total);
  const auto states = de_states_all(in.stats, anchor, in.params, cfg);
  return make_surrogate(in.stats, anchor, in.params, states);
}

inline PowerAllocation random_feasible(const SystemParams& p,
                                       std::uint64_t seed, double total) {
  Rng rng(seed);
  PowerAllocation a = PowerAllocation::zeros(p);
  double sum = 0.0;
  for (int k = 0; k < p.K; ++k)
    for (int m = 0; m < p.M; ++m) {
      a.lambda[k][m] = -std::log(rng.uniform_pos());
      sum += a.lambda[k][m];
    }
  for (auto& lam : a.lambda) lam *= total / sum;
  return a;
}

}  // namespace beamre::testing
