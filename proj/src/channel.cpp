#include "gmoe/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

double ChannelParams::cp_margin() const noexcept { return noise - std::abs(tau - 1.0); }

ChannelDecomposition decompose(const ChannelParams& params) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau) || !std::isfinite(params.noise)) {
    throw Error(ErrorKind::InvalidParameter, "tau must be finite and > 0, noise finite");
  }
  const double margin = params.cp_margin();
  if (margin < 0.0) {
    std::ostringstream os;
    os << "not completely positive: noise " << params.noise << " < |tau - 1| = " << std::abs(params.tau - 1.0) << " (deficit "
       << -margin << ")";
    throw Error(ErrorKind::NotCompletelyPositive, os.str());
  }
  ChannelDecomposition d;
  d.gain = std::max(1.0, (params.noise + params.tau + 1.0) / 2.0);
  d.transmissivity = std::min(1.0, params.tau / d.gain);
  d.squeeze = std::acosh(std::sqrt(d.gain));
  d.cp_margin = margin;
  return d;
}

GaussianMoments moment_map(const GaussianMoments& moments, const ChannelParams& params) {
  const double s = std::sqrt(params.tau);
  GaussianMoments out;
  out.mean = {s * moments.mean[0], s * moments.mean[1]};
  out.cov = params.tau * moments.cov + params.noise * Eigen::Matrix2d::Identity();
  return out;
}

DensityMatrix apply_loss(const DensityMatrix& rho, double transmissivity) {
  const double T = transmissivity;
  if (!(T >= 0.0 && T <= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "transmissivity must lie in [0, 1]");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXd kraus(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    kraus.setZero();
    for (Eigen::Index n = m; n < dim; ++n) {
      const double log_amp = 0.5 * log_binomial(static_cast<double>(n), static_cast<double>(m));
      double amp = std::exp(log_amp);
      amp *= std::pow(T, 0.5 * static_cast<double>(n - m));
      amp *= std::pow(1.0 - T, 0.5 * static_cast<double>(m));
      kraus(n - m, n) = amp;
    }
    if (kraus.isZero(0.0)) continue;
    out.noalias() += kraus * rho.entries() * kraus.transpose();
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix apply_amp(const DensityMatrix& rho, double gain, std::size_t out_dim, double eps) {
  const SqueezeParam sq = SqueezeParam::from_gain(gain);
  const double lambda = sq.lambda();
  const std::size_t in_dim = rho.dim();

  // each populated input level a needs a + N(a) output levels
  std::size_t need = in_dim;
  for (std::size_t a = 0; a < in_dim; ++a) {
    const double pop = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
    if (pop <= 0.0) continue;
    need = std::max(need, a + auto_truncation(a, lambda, eps) + 1);
  }
  const std::size_t dim = out_dim == 0 ? need : out_dim;

  // sqrt(p_n^(a)) for n < dim - a
  std::vector<std::vector<double>> amp(in_dim);
  CompensatedSum dropped;
  for (std::size_t a = 0; a < in_dim; ++a) {
    if (a >= dim) break;
    amp[a].resize(dim - a);
    for (std::size_t n = 0; n < dim - a; ++n) amp[a][n] = std::sqrt(schmidt_coefficient(a, lambda, n));
    const double pop = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
    if (pop > 0.0) dropped += pop * schmidt_tail(a, lambda, dim - a - 1);
  }
  for (std::size_t a = dim; a < in_dim; ++a) {
    dropped += std::max(0.0, rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real());
  }
  if (dropped.value() > eps) {
    std::ostringstream os;
    os << "output dimension " << dim << " drops trace " << dropped.value() << " > eps = " << eps;
    throw TruncationError(os.str(), need);
  }

  const Eigen::Index d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t a = 0; a < in_dim && a < dim; ++a) {
    for (std::size_t b = 0; b < in_dim && b < dim; ++b) {
      const cplx r_ab = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (r_ab == cplx{}) continue;
      const std::size_t n_max = dim - std::max(a, b);
      for (std::size_t n = 0; n < n_max; ++n) {
        out(static_cast<Eigen::Index>(a + n), static_cast<Eigen::Index>(b + n)) += r_ab * amp[a][n] * amp[b][n];
      }
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelParams& params, std::size_t out_dim,
                            double eps) {
  const ChannelDecomposition d = decompose(params);
  return apply_amp(apply_loss(rho, d.transmissivity), d.gain, out_dim, eps);
}

double thermal_entropy(double mean_photon) {
  const double x = mean_photon;
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log(x + 1.0) - x * std::log(x);
}

double vacuum_output_entropy(const ChannelParams& params) {
  const double nu = params.tau + params.noise;
  return thermal_entropy((nu - 1.0) / 2.0);
}

}  // namespace gmoe
