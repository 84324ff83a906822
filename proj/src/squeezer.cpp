#include "gmoe/squeezer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside [0, 1)";
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

constexpr std::size_t kMaxTruncation = std::size_t{1} << 24;

}  // namespace

SqueezeParam SqueezeParam::from_r(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidParameter, "squeeze parameter r must be finite and >= 0");
  }
  const double lambda = std::tanh(r);
  check_lambda(lambda);
  return {r, lambda};
}

SqueezeParam SqueezeParam::from_lambda(double lambda) {
  check_lambda(lambda);
  return {std::atanh(lambda), lambda};
}

SqueezeParam SqueezeParam::from_gain(double gain) {
  if (!(gain >= 1.0) || !std::isfinite(gain)) {
    throw Error(ErrorKind::InvalidParameter, "amplifier gain must be finite and >= 1");
  }
  // lambda^2 = 1 - 1/G
  const double lambda = std::sqrt(1.0 - 1.0 / gain);
  check_lambda(lambda);
  return {std::acosh(std::sqrt(gain)), lambda};
}

double SqueezeParam::gain() const noexcept {
  const double c = std::cosh(r_);
  return c * c;
}

double schmidt_coefficient(std::size_t k, double lambda, std::size_t n) {
  check_lambda(lambda);
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  const double x = lambda * lambda;
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  const double log_x_part = nn * std::log(x);
  const double log_binom = log_binomial(nn + kk, nn);
  const double log_p = (kk + 1.0) * std::log1p(-x) + log_x_part + log_binom;
  if (log_p > -600.0 && log_x_part > -600.0 && log_binom < 600.0) {
    return std::pow(1.0 - x, kk + 1.0) * std::pow(x, nn) * binomial(nn + kk, nn);
  }
  return std::exp(log_p);
}

double schmidt_tail(std::size_t k, double lambda, std::size_t N) {
  check_lambda(lambda);
  return negative_binomial_tail(lambda * lambda, static_cast<long>(k) + 1, static_cast<long>(N));
}

std::size_t auto_truncation(std::size_t k, double lambda, double eps) {
  check_lambda(lambda);
  if (lambda == 0.0) return 0;
  // jump ahead by doubling, then bisect on the analytic tail
  std::size_t lo = 0;
  std::size_t hi = std::max<std::size_t>(1, static_cast<std::size_t>((k + 1) * lambda * lambda / (1 - lambda * lambda)));
  while (schmidt_tail(k, lambda, hi) >= eps) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxTruncation) {
      throw TruncationError("schmidt vector needs more than 2^24 entries", hi);
    }
  }
  if (schmidt_tail(k, lambda, lo) < eps) return lo;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (schmidt_tail(k, lambda, mid) < eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ProbabilityVector schmidt_vector(std::size_t k, double lambda, std::optional<std::size_t> N, double eps) {
  const std::size_t n_max = N.value_or(auto_truncation(k, lambda, eps));
  std::vector<double> probs(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) probs[n] = schmidt_coefficient(k, lambda, n);
  return ProbabilityVector(std::move(probs), schmidt_tail(k, lambda, n_max));
}

std::size_t required_b_dim(const FockState& input, double lambda, double eps) {
  std::size_t b_dim = 1;
  const auto c = input.amplitudes();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == cplx{}) continue;
    b_dim = std::max(b_dim, auto_truncation(k, lambda, eps) + 1);
  }
  return b_dim;
}

BipartiteAmplitudeMatrix output_state(const FockState& input, double r, std::optional<std::size_t> b_dim,
                                      double eps) {
  const SqueezeParam sq = SqueezeParam::from_r(r);
  const double lambda = sq.lambda();
  const std::size_t need = required_b_dim(input, lambda, eps);
  const std::size_t cols = b_dim.value_or(need);
  if (cols == 0) throw Error(ErrorKind::InvalidParameter, "B_dim must be positive");

  const auto c = input.amplitudes();
  const std::size_t rows = input.dim() + cols;
  BipartiteAmplitudeMatrix out;
  out.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  CompensatedSum omitted;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == cplx{}) continue;
    for (std::size_t n = 0; n < cols; ++n) {
      out.entries(static_cast<Eigen::Index>(n + k), static_cast<Eigen::Index>(n)) +=
          c[k] * std::sqrt(schmidt_coefficient(k, lambda, n));
    }
    omitted += std::norm(c[k]) * schmidt_tail(k, lambda, cols - 1);
  }
  out.tail_mass = omitted.value();
  if (out.tail_mass > eps) {
    std::ostringstream os;
    os << "B_dim = " << cols << " drops joint mass " << out.tail_mass << " > eps = " << eps;
    throw TruncationError(os.str(), need);
  }
  return out;
}

EntropyValue output_entanglement(const FockState& input, double r, std::optional<std::size_t> b_dim,
                                 double eps) {
  const BipartiteAmplitudeMatrix m = output_state(input, r, b_dim, eps);
  if (r == 0.0) return {};
  return entropy(schmidt_spectrum(m));
}

double tmsv_entropy(double r) {
  if (r == 0.0) return 0.0;
  const double c2 = std::cosh(r) * std::cosh(r);
  const double s2 = std::sinh(r) * std::sinh(r);
  return c2 * std::log(c2) - s2 * std::log(s2);
}

InfinitesimalResult infinitesimal_approx(const FockState& input, double r, double zero_mean_tol, double eps) {
  const StateMoments mom = state_moments(input);
  if (!mom.zero_mean(zero_mean_tol)) {
    std::ostringstream os;
    os << "input has |<a>| = " << std::abs(mom.mean_lowering) << " > " << zero_mean_tol;
    throw Error(ErrorKind::PreconditionViolated, os.str());
  }
  InfinitesimalResult res;
  res.lambda_phi = 1.0 / (1.0 + r * r * (mom.mean_photon + 1.0) / 4.0);
  res.two_term_spectrum = ProbabilityVector({res.lambda_phi, 1.0 - res.lambda_phi});

  const ProbabilityVector exact = schmidt_spectrum(output_state(input, r, std::nullopt, eps));
  res.exact_leading = exact[0];
  res.exact_second = exact[1];
  res.deviation = std::max(std::abs(res.exact_leading - res.lambda_phi),
                           std::abs(res.exact_second - (1.0 - res.lambda_phi)));
  return res;
}

}  // namespace gmoe
