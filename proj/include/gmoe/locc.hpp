#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gmoe/squeezer.hpp"

namespace gmoe {

struct ProtocolOutcome {
  std::string label;
  /// Brute-force probability: squared norm of the branch after every
  /// measurement operator has been applied to the truncated state.
  double probability = 0.0;
  /// Closed-form probability of the same outcome.
  double predicted_probability = 0.0;
  /// Fidelity of the normalized final branch with the target restricted to
  /// the Bob levels the branch can occupy.
  double fidelity = 0.0;
  /// Target mass outside that window.
  double window_tail = 0.0;
  /// Fidelity with the untruncated target.
  double full_fidelity = 0.0;
  double final_entropy = 0.0;
};

/// Exhaustive record of one LOCC conversion, outcomes ordered by label.
struct ProtocolTrace {
  std::string protocol;
  std::vector<ProtocolOutcome> outcomes;
  /// max |sum_m K_m^T K_m - I| over the supported Bob levels, worst over
  /// every measurement stage.
  double completeness_residual = 0.0;
  double completeness_bound = 0.0;
  /// max |probability - predicted_probability|
  double probability_residual = 0.0;
  /// Mass of the initial state dropped by truncation.
  double tail_mass = 0.0;
  /// |sum probabilities + tail_mass - 1|
  double probability_sum_residual = 0.0;
  /// Largest amplitude Alice's shift discarded (should be zero).
  double shift_leak = 0.0;
  double initial_entropy = 0.0;
  double max_final_entropy = 0.0;
  std::size_t bob_levels = 0;
  /// Every outcome reaches fidelity >= 1 - 1e-9.
  bool deterministic = false;
};

inline constexpr double kFidelityTol = 1e-9;

/// Bob's POVM B_m followed by Alice's shift A_m, converting
/// |Psi^(k+delta_k)_lambda> into |Psi^(k)_lambda>. N (largest Bob level) is
/// chosen from eps when omitted. Throws ProtocolInconsistent if the POVM is
/// incomplete beyond the truncation bound.
ProtocolTrace povm_reduce(int k, int delta_k, double lambda, std::optional<std::size_t> N = std::nullopt,
                          double eps = kDefaultEps);

/// Beam splitter of transmissivity T = lambda'^2 / lambda^2 on Bob's mode with a
/// vacuum ancilla, photon counting on the ancilla, then povm_reduce(k, l) for
/// each count l, converting |Psi^(k)_lambda> into |Psi^(k)_lambda'>.
/// Throws InvalidParameter unless 0 <= lambda' < lambda < 1.
ProtocolTrace bs_attenuate(int k, double lambda, double lambda_prime, std::optional<std::size_t> N = std::nullopt,
                           double eps = kDefaultEps);

/// Closed-form photocount law
/// P(l) = (1-T)^l lambda^(2l) binom(k+l, l) (1-lambda^2)^(k+1) / (1-T lambda^2)^(k+l+1).
double photocount_probability(int k, double lambda, double transmissivity, int l);

}  // namespace gmoe
