#pragma once

#include <Eigen/Core>
#include <vector>

namespace beamre {

/// Physical and economic constants of the downlink. All powers are linear
/// watts; dBm exists only at the config boundary.
struct SystemParams {
  int M = 1;                 ///< BS antenna / beam count
  int K = 1;                 ///< number of user terminals
  std::vector<int> N;        ///< receive antennas per UT (size K)
  double W = 1.0;            ///< bandwidth [Hz]
  double sigma2 = 1.0;       ///< noise power [W]
  double xi = 1.0;           ///< amplifier inefficiency (> 0)
  double Pc = 1.0;           ///< per-antenna dynamic power [W]
  double Ps = 1.0;           ///< static power [W]
  double Pmax = 1.0;         ///< transmit power budget [W]
  double beta = 0.0;         ///< EE-SE weighting factor (>= 0)

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

/// Per-UT beam-power vectors (diagonals of the transmit covariances), watts.
struct PowerAllocation {
  std::vector<Eigen::VectorXd> lambda;

  double total() const;
  static PowerAllocation zeros(const SystemParams& p);
  /// Spread `total` watts evenly over all K*M beams.
  static PowerAllocation uniform(const SystemParams& p, double total);
};

/// Statistical CSI: per-UT eigenmode coupling matrices (N_k x M, mean beam
/// power gains). The only channel knowledge the solver consumes.
struct ChannelStats {
  std::vector<Eigen::MatrixXd> omega;

  /// Throws std::invalid_argument if shapes or signs don't match `p`.
  void validate(const SystemParams& p) const;
};

/// Consumed power: xi * (total transmit) + M*Pc + Ps.
double total_power(const PowerAllocation& alloc, const SystemParams& p);

/// Power budget normalizer: xi * Pmax + M*Pc + Ps.
double budget_power(const SystemParams& p);

}  // namespace beamre
