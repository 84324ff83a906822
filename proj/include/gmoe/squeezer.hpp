#pragma once

#include <cstddef>
#include <optional>

#include "gmoe/fock.hpp"

namespace gmoe {

/// Default bound on probability mass dropped by any automatic truncation.
inline constexpr double kDefaultEps = 1e-12;

/// Two-mode squeezing strength. All closed forms are keyed on
/// lambda = tanh r; the gain of the induced amplifier is G = cosh^2 r.
class SqueezeParam {
 public:
  static SqueezeParam from_r(double r);
  static SqueezeParam from_lambda(double lambda);
  /// Squeezer realizing a quantum-limited amplifier of gain G >= 1.
  static SqueezeParam from_gain(double gain);

  double r() const noexcept { return r_; }
  double lambda() const noexcept { return lambda_; }
  double lambda_squared() const noexcept { return lambda_ * lambda_; }
  double gain() const noexcept;

 private:
  SqueezeParam(double r, double lambda) : r_(r), lambda_(lambda) {}
  double r_;
  double lambda_;
};

/// p_n^(k)(lambda) = (1-lambda^2)^(k+1) lambda^(2n) binom(n+k, n), evaluated in
/// log space.
double schmidt_coefficient(std::size_t k, double lambda, std::size_t n);

/// Mass of p^(k)(lambda) beyond index N, from the negative-binomial tail.
double schmidt_tail(std::size_t k, double lambda, std::size_t N);

/// Smallest N such that schmidt_tail(k, lambda, N) < eps.
std::size_t auto_truncation(std::size_t k, double lambda, double eps = kDefaultEps);

/// Entries n = 0..N of p^(k)(lambda); tail_mass is the analytic remainder.
/// N defaults to auto_truncation(k, lambda, eps).
ProbabilityVector schmidt_vector(std::size_t k, double lambda, std::optional<std::size_t> N = std::nullopt,
                                 double eps = kDefaultEps);

/// Bob-side dimension needed so that the joint mass dropped from
/// U(r)(|input> x |0>) is below eps.
std::size_t required_b_dim(const FockState& input, double lambda, double eps = kDefaultEps);

/// Amplitudes of U(r)(|input> x |0>): M[n+k, n] = c_k sqrt(p_n^(k)(lambda)).
/// A_dim = input.dim() + B_dim. Throws TruncationError when an explicit B_dim
/// drops more than eps of joint mass.
BipartiteAmplitudeMatrix output_state(const FockState& input, double r,
                                      std::optional<std::size_t> b_dim = std::nullopt,
                                      double eps = kDefaultEps);

/// Entanglement entropy (nats) of U(r)(|input> x |0>).
EntropyValue output_entanglement(const FockState& input, double r,
                                 std::optional<std::size_t> b_dim = std::nullopt, double eps = kDefaultEps);

/// Closed-form entropy of the two-mode squeezed vacuum,
/// cosh^2 r ln cosh^2 r - sinh^2 r ln sinh^2 r.
double tmsv_entropy(double r);

struct InfinitesimalResult {
  double lambda_phi = 1.0;
  ProbabilityVector two_term_spectrum;
  /// The two largest exact Schmidt coefficients.
  double exact_leading = 1.0;
  double exact_second = 0.0;
  /// max(|exact_leading - lambda_phi|, |exact_second - (1 - lambda_phi)|)
  double deviation = 0.0;
};

/// Leading-order Schmidt form of a weakly squeezed zero-mean input:
/// lambda_phi = 1 / (1 + r^2 (nbar + 1) / 4). Throws PreconditionViolated if
/// |<a>| exceeds zero_mean_tol.
InfinitesimalResult infinitesimal_approx(const FockState& input, double r, double zero_mean_tol = 1e-10,
                                         double eps = kDefaultEps);

}  // namespace gmoe
