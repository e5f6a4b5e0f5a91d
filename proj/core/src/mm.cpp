#include "beamre/mm.hpp"

#include <cmath>
#include <stdexcept>

#include "beamre/de.hpp"

namespace beamre {

MmState mm_solve(const ChannelStats& stats, const SystemParams& params,
                 const SolverConfig& cfg, const PowerAllocation& init) {
  if (init.total() > params.Pmax * (1.0 + 1e-9))
    throw std::invalid_argument("mm_solve: initial allocation exceeds Pmax");

  MmState st;
  st.alloc = init;
  st.re_trace.push_back(de_re(stats, init, params, cfg));

  for (int ell = 0; ell < cfg.max_mm_iter; ++ell) {
    std::vector<DeState> states = de_states_all(stats, st.alloc, params, cfg);
    for (const auto& s : states)
      if (!s.converged)
        throw std::runtime_error("mm_solve: DE fixed point did not converge");

    const Surrogate sur = make_surrogate(stats, st.alloc, params, states);
    const PtSearchResult pts = search_transmit_power(stats, sur, params, cfg);
    if (!pts.converged || !pts.best.converged) st.inner_ok = false;

    st.alloc = pts.best.alloc;
    st.d = sur.d;
    st.ell = ell + 1;
    const double re = de_re(stats, st.alloc, params, cfg);
    st.re_trace.push_back(re);

    const double prev = st.re_trace[st.re_trace.size() - 2];
    if (std::abs(re - prev) <= cfg.eps3) {
      st.converged = true;
      break;
    }
  }
  return st;
}

MmState mm_solve(const ChannelStats& stats, const SystemParams& params,
                 const SolverConfig& cfg) {
  return mm_solve(stats, params, cfg,
                  PowerAllocation::uniform(params, params.Pmax));
}

}  // namespace beamre
