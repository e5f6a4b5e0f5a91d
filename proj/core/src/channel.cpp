#include "beamre/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "beamre/rng.hpp"

namespace beamre {

ChannelStats synth_coupling(const SystemParams& params, double pathloss_db,
                            double support_fraction, double decay,
                            std::uint64_t seed, double jitter) {
  if (!(support_fraction > 0.0) || support_fraction > 1.0)
    throw std::invalid_argument("support_fraction must be in (0, 1]");
  if (!(decay >= 0.0)) throw std::invalid_argument("decay must be >= 0");
  if (jitter < 0.0 || jitter >= 1.0)
    throw std::invalid_argument("jitter must be in [0, 1)");

  const int M = params.M;
  const int support = static_cast<int>(std::ceil(support_fraction * M));
  const double mean_gain = std::pow(10.0, pathloss_db / 10.0);

  ChannelStats stats;
  stats.omega.reserve(params.K);
  for (int k = 0; k < params.K; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const int Nk = params.N[k];
    const int offset =
        support < M ? static_cast<int>(rng.uniform_int(0, M - support)) : 0;
    const double center = offset + 0.5 * (support - 1);

    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(Nk, M);
    for (int n = 0; n < Nk; ++n) {
      for (int m = offset; m < offset + support; ++m) {
        const double profile = std::exp(-decay * std::abs(m - center));
        const double j = 1.0 + jitter * (2.0 * rng.uniform() - 1.0);
        o(n, m) = profile * j;
      }
    }
    // normalize mean entry to the linear pathloss
    const double sum = o.sum();
    o *= mean_gain * static_cast<double>(Nk) * M / sum;
    stats.omega.push_back(std::move(o));
  }
  return stats;
}

void save_omega(std::ostream& os, const ChannelStats& stats) {
  const int K = static_cast<int>(stats.omega.size());
  const int M = K > 0 ? static_cast<int>(stats.omega[0].cols()) : 0;
  os << K << ' ' << M << '\n';
  char buf[40];
  for (const auto& o : stats.omega) {
    os << o.rows() << '\n';
    for (Eigen::Index n = 0; n < o.rows(); ++n) {
      for (Eigen::Index m = 0; m < o.cols(); ++m) {
        std::snprintf(buf, sizeof(buf), "%.17g", o(n, m));
        os << (m ? " " : "") << buf;
      }
      os << '\n';
    }
  }
}

void save_omega_file(const std::string& path, const ChannelStats& stats) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_omega(os, stats);
}

ChannelStats load_omega(std::istream& is) {
  int K = 0, M = 0;
  if (!(is >> K >> M) || K < 1 || M < 1)
    throw std::runtime_error("omega file: bad header (expected 'K M')");
  ChannelStats stats;
  stats.omega.reserve(K);
  for (int k = 0; k < K; ++k) {
    int Nk = 0;
    if (!(is >> Nk) || Nk < 1)
      throw std::runtime_error("omega file: bad N_k for UT " +
                               std::to_string(k));
    Eigen::MatrixXd o(Nk, M);
    for (int n = 0; n < Nk; ++n)
      for (int m = 0; m < M; ++m) {
        double v;
        if (!(is >> v) || v < 0.0)
          throw std::runtime_error("omega file: bad entry for UT " +
                                   std::to_string(k));
        o(n, m) = v;
      }
    stats.omega.push_back(std::move(o));
  }
  return stats;
}

ChannelStats load_omega_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_omega(is);
}

}  // namespace beamre
