#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "gmoe/fock.hpp"
#include "gmoe/squeezer.hpp"

namespace gmoe {

/// Phase-insensitive Gaussian channel: K = sqrt(tau) I, N = noise I, in
/// quadrature units where the vacuum covariance is the identity.
struct ChannelParams {
  double tau = 1.0;
  double noise = 0.0;

  /// noise - |tau - 1|; negative means the map is not completely positive.
  double cp_margin() const noexcept;
};

/// Pure loss of transmissivity T followed by a quantum-limited amplifier of
/// gain G = cosh^2 r.
struct ChannelDecomposition {
  double transmissivity = 1.0;  // T
  double gain = 1.0;            // G
  double squeeze = 0.0;         // r
  double cp_margin = 0.0;
};

/// G = (n + tau + 1) / 2, T = tau / G. Throws NotCompletelyPositive when
/// noise < |tau - 1| and InvalidParameter for tau <= 0.
ChannelDecomposition decompose(const ChannelParams& params);

struct GaussianMoments {
  std::array<double, 2> mean{0.0, 0.0};
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();

  static GaussianMoments vacuum() { return {}; }
};

/// mean -> sqrt(tau) mean, cov -> tau cov + noise I.
GaussianMoments moment_map(const GaussianMoments& moments, const ChannelParams& params);

/// Pure-loss channel via the beam-splitter Kraus operators
/// A_m = sum_n sqrt(binom(n,m)) T^((n-m)/2) (1-T)^(m/2) |n-m><n|.
DensityMatrix apply_loss(const DensityMatrix& rho, double transmissivity);

/// Quantum-limited amplifier: (A rho)_{a+n, b+n} += rho_ab sqrt(p_n^(a) p_n^(b))
/// with lambda^2 = 1 - 1/G. out_dim == 0 selects the smallest dimension that
/// keeps the dropped trace below eps; an explicit out_dim that is too small
/// raises TruncationError.
DensityMatrix apply_amp(const DensityMatrix& rho, double gain, std::size_t out_dim = 0, double eps = kDefaultEps);

/// apply_amp(apply_loss(rho, T), G) with (T, G) from decompose(params).
DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelParams& params, std::size_t out_dim = 0,
                            double eps = kDefaultEps);

/// Entropy of a thermal state with mean photon number x:
/// (x+1) ln(x+1) - x ln x.
double thermal_entropy(double mean_photon);

/// Output entropy of the channel on vacuum from the symplectic eigenvalue
/// nu = tau + n of the output covariance, g((nu - 1) / 2).
double vacuum_output_entropy(const ChannelParams& params);

}  // namespace gmoe
