#include "beamre/rates.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "beamre/de.hpp"
#include "beamre/rng.hpp"

namespace beamre {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// log det of a Hermitian positive-definite matrix via Cholesky
double lndet_hpd(const Eigen::MatrixXcd& a) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lndet_hpd: matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
}

// Beam-domain channel sample of UT k: independent CN(0, omega(n,m)) entries.
// One substream per (k, sample) pair so estimates are identical no matter how
// the sample loop is scheduled.
Eigen::MatrixXcd sample_channel(const Eigen::MatrixXd& omega, int k,
                                std::uint64_t seed, int sample) {
  Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(k)),
                      static_cast<std::uint64_t>(sample)));
  Eigen::MatrixXcd g(omega.rows(), omega.cols());
  for (Eigen::Index n = 0; n < omega.rows(); ++n)
    for (Eigen::Index m = 0; m < omega.cols(); ++m) {
      const double z_re = rng.normal();
      const double z_im = rng.normal();
      const double sd = std::sqrt(0.5 * omega(n, m));
      g(n, m) = std::complex<double>(sd * z_re, sd * z_im);
    }
  return g;
}

double mc_rate(const ChannelStats& stats, const PowerAllocation& alloc, int k,
               double sigma2, int n_samples, std::uint64_t seed, bool exact) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const auto& omega = stats.omega[k];
  const Eigen::Index nk = omega.rows();

  Eigen::VectorXd floor_diag;
  if (!exact) floor_diag = interference_floor(stats, alloc, k, sigma2);

  const int K = static_cast<int>(stats.omega.size());
  double acc = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::MatrixXcd g = sample_channel(omega, k, seed, s);
    const Eigen::MatrixXcd signal =
        g * alloc.lambda[k].asDiagonal() * g.adjoint();

    Eigen::MatrixXcd noise;
    if (exact) {
      noise = sigma2 * Eigen::MatrixXcd::Identity(nk, nk);
      for (int i = 0; i < K; ++i) {
        if (i == k) continue;
        noise += g * alloc.lambda[i].asDiagonal() * g.adjoint();
      }
    } else {
      noise = floor_diag.cast<std::complex<double>>().asDiagonal();
    }
    acc += lndet_hpd(noise + signal) - lndet_hpd(noise);
  }
  return acc / (n_samples * kLn2);
}

}  // namespace

Eigen::VectorXd coupled_rx_power(const Eigen::MatrixXd& omega,
                                 const Eigen::VectorXd& beam_power) {
  if (omega.cols() != beam_power.size())
    throw std::invalid_argument("coupled_rx_power: shape mismatch");
  return omega * beam_power;
}

Eigen::VectorXd coupled_beam_gain(const Eigen::MatrixXd& omega,
                                  const Eigen::VectorXd& rx_weight) {
  if (omega.rows() != rx_weight.size())
    throw std::invalid_argument("coupled_beam_gain: shape mismatch");
  return omega.transpose() * rx_weight;
}

Eigen::VectorXd interference_floor(const ChannelStats& stats,
                                   const PowerAllocation& alloc, int k,
                                   double sigma2) {
  const auto& omega = stats.omega[k];
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(omega.cols());
  for (std::size_t i = 0; i < alloc.lambda.size(); ++i)
    if (static_cast<int>(i) != k) cross += alloc.lambda[i];
  return (omega * cross).array() + sigma2;
}

double mc_rate_exact(const ChannelStats& stats, const PowerAllocation& alloc,
                     int k, double sigma2, int n_samples, std::uint64_t seed) {
  return mc_rate(stats, alloc, k, sigma2, n_samples, seed, true);
}

double mc_rate_approx(const ChannelStats& stats, const PowerAllocation& alloc,
                      int k, double sigma2, int n_samples, std::uint64_t seed) {
  return mc_rate(stats, alloc, k, sigma2, n_samples, seed, false);
}

MetricsReport metrics(const ChannelStats& stats, const PowerAllocation& alloc,
                      const SystemParams& params, RateModel model,
                      int n_samples, std::uint64_t seed) {
  MetricsReport r;
  r.per_user_rates.resize(params.K);
  for (int k = 0; k < params.K; ++k) {
    switch (model) {
      case RateModel::kExact:
        r.per_user_rates[k] =
            mc_rate_exact(stats, alloc, k, params.sigma2, n_samples, seed);
        break;
      case RateModel::kApprox:
        r.per_user_rates[k] =
            mc_rate_approx(stats, alloc, k, params.sigma2, n_samples, seed);
        break;
      case RateModel::kDeterministic: {
        const DeState state =
            de_fixed_point(stats, alloc, k, params.sigma2, 1e-8, 1000);
        r.per_user_rates[k] = de_rate(state, alloc, k, stats, params.sigma2);
        break;
      }
    }
    r.se += r.per_user_rates[k];
  }
  r.p_sum = total_power(alloc, params);
  r.ee = params.W * r.se / r.p_sum;
  r.re = r.ee / params.W + params.beta * r.se / budget_power(params);
  return r;
}

}  // namespace beamre
