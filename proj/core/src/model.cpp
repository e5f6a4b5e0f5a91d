#include "beamre/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamre {

void SystemParams::validate() const {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (static_cast<int>(N.size()) != K)
    throw std::invalid_argument("N must list one antenna count per UT");
  for (int nk : N)
    if (nk < 1) throw std::invalid_argument("every N_k must be >= 1");
  if (!(W > 0)) throw std::invalid_argument("W must be > 0");
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be > 0");
  if (!(xi > 0)) throw std::invalid_argument("xi must be > 0");
  if (!(Pc > 0)) throw std::invalid_argument("Pc must be > 0");
  if (!(Ps > 0)) throw std::invalid_argument("Ps must be > 0");
  if (!(Pmax > 0)) throw std::invalid_argument("Pmax must be > 0");
  if (beta < 0) throw std::invalid_argument("beta must be >= 0");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

double PowerAllocation::total() const {
  double t = 0.0;
  for (const auto& lam : lambda) t += lam.sum();
  return t;
}

PowerAllocation PowerAllocation::zeros(const SystemParams& p) {
  PowerAllocation a;
  a.lambda.assign(p.K, Eigen::VectorXd::Zero(p.M));
  return a;
}

PowerAllocation PowerAllocation::uniform(const SystemParams& p, double total) {
  PowerAllocation a;
  const double per_beam = total / (static_cast<double>(p.K) * p.M);
  a.lambda.assign(p.K, Eigen::VectorXd::Constant(p.M, per_beam));
  return a;
}

void ChannelStats::validate(const SystemParams& p) const {
  if (static_cast<int>(omega.size()) != p.K)
    throw std::invalid_argument("omega must have one matrix per UT");
  for (int k = 0; k < p.K; ++k) {
    const auto& o = omega[k];
    if (o.rows() != p.N[k] || o.cols() != p.M)
      throw std::invalid_argument("omega[" + std::to_string(k) +
                                  "] has wrong shape");
    if ((o.array() < 0).any())
      throw std::invalid_argument("omega entries must be >= 0");
  }
}

double total_power(const PowerAllocation& alloc, const SystemParams& p) {
  return p.xi * alloc.total() + p.M * p.Pc + p.Ps;
}

double budget_power(const SystemParams& p) {
  return p.xi * p.Pmax + p.M * p.Pc + p.Ps;
}

}  // namespace beamre
