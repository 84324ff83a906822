#include "gmoe/locc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

// Real amplitude matrix of |Psi^(k)_lambda>, Bob levels 0..bob-1.
MatrixXd fock_output(int k, double lambda, Index bob, Index alice) {
  MatrixXd psi = MatrixXd::Zero(alice, bob);
  for (Index n = 0; n < bob && n + k < alice; ++n) {
    psi(n + k, n) = std::sqrt(schmidt_coefficient(static_cast<std::size_t>(k), lambda, static_cast<std::size_t>(n)));
  }
  return psi;
}

double spectrum_entropy(const MatrixXd& psi) {
  Eigen::BDCSVD<MatrixXd> svd(psi);
  const Eigen::VectorXd s = svd.singularValues();
  std::vector<double> p(static_cast<std::size_t>(s.size()));
  const double norm2 = s.squaredNorm();
  for (Index i = 0; i < s.size(); ++i) p[static_cast<std::size_t>(i)] = s(i) * s(i) / norm2;
  return entropy(ProbabilityVector(std::move(p))).value;
}

// POVM weight w_m = (1-l^2)^dk binom(m+dk-1, dk-1) l^(2m)
double povm_weight(int dk, double lambda, int m) {
  if (lambda == 0.0) return m == 0 ? 1.0 : 0.0;
  const double x = lambda * lambda;
  return std::exp(dk * std::log1p(-x) + log_binomial(m + dk - 1.0, dk - 1.0) + m * std::log(x));
}

struct Branch {
  std::string label;
  MatrixXd state;  // unnormalized, as produced by the measurement operators
  double predicted = 0.0;
};

struct StageStats {
  double completeness = 0.0;
  double shift_leak = 0.0;
};

// Bob measures {B_m} on psi (which should be proportional to
// |Psi^(k+dk)_lambda>), then Alice shifts down by m + dk.
std::vector<Branch> run_povm(const MatrixXd& psi, int k, int dk, double lambda, const std::string& prefix,
                             double prefix_prob, StageStats& stats) {
  const Index bob = psi.cols();
  const auto p_in = [&](Index l) {
    return schmidt_coefficient(static_cast<std::size_t>(k + dk), lambda, static_cast<std::size_t>(l));
  };
  const auto p_out = [&](Index n) {
    return schmidt_coefficient(static_cast<std::size_t>(k), lambda, static_cast<std::size_t>(n));
  };
  std::vector<bool> support(static_cast<std::size_t>(bob));
  for (Index l = 0; l < bob; ++l) support[static_cast<std::size_t>(l)] = p_in(l) > 0.0;

  std::vector<Branch> out;
  MatrixXd completeness = MatrixXd::Zero(bob, bob);
  for (Index m = 0; m < bob; ++m) {
    const double w = povm_weight(dk, lambda, static_cast<int>(m));
    MatrixXd op = MatrixXd::Zero(bob, bob);
    for (Index l = m; l < bob; ++l) {
      if (!support[static_cast<std::size_t>(l)]) continue;
      op(l - m, l) = std::sqrt(w * p_out(l - m) / p_in(l));
    }
    if (op.isZero(0.0)) continue;
    completeness.noalias() += op.transpose() * op;

    // (I x B_m)|psi> has amplitude matrix psi B_m^T
    const MatrixXd measured = psi * op.transpose();
    const Index shift = m + dk;
    const Index rows = std::max<Index>(0, measured.rows() - shift);
    if (shift > 0 && measured.rows() > 0) {
      const Index dropped = std::min(shift, measured.rows());
      stats.shift_leak = std::max(stats.shift_leak, measured.topRows(dropped).cwiseAbs().maxCoeff());
    }
    Branch b;
    b.label = prefix + "m=" + std::to_string(m);
    b.state = measured.bottomRows(rows);
    b.predicted = prefix_prob * w;
    out.push_back(std::move(b));
  }
  for (Index l = 0; l < bob; ++l) {
    if (!support[static_cast<std::size_t>(l)]) continue;
    for (Index j = 0; j < bob; ++j) {
      if (!support[static_cast<std::size_t>(j)]) continue;
      const double expect = l == j ? 1.0 : 0.0;
      stats.completeness = std::max(stats.completeness, std::abs(completeness(l, j) - expect));
    }
  }
  return out;
}

void score_outcome(ProtocolOutcome& o, const MatrixXd& state, int k, double lambda) {
  const double norm2 = state.squaredNorm();
  o.probability = norm2;
  if (norm2 <= 0.0) return;
  // the branch can only occupy Bob levels below `window`
  Index window = 0;
  for (Index n = 0; n < state.cols(); ++n) {
    if (n + k < state.rows()) window = n + 1;
  }
  CompensatedSum overlap;
  for (Index n = 0; n < window; ++n) {
    overlap += std::sqrt(schmidt_coefficient(static_cast<std::size_t>(k), lambda, static_cast<std::size_t>(n))) *
               state(n + k, n);
  }
  o.window_tail = window > 0 ? schmidt_tail(static_cast<std::size_t>(k), lambda, static_cast<std::size_t>(window - 1))
                             : 1.0;
  o.full_fidelity = overlap.value() * overlap.value() / norm2;
  o.fidelity = o.window_tail < 1.0 ? o.full_fidelity / (1.0 - o.window_tail) : 0.0;
  o.final_entropy = spectrum_entropy(state);
}

void finish(ProtocolTrace& trace, const std::vector<Branch>& branches, int k, double lambda, const StageStats& stats,
            double tail_bound) {
  CompensatedSum total;
  for (const Branch& b : branches) {
    ProtocolOutcome o;
    o.label = b.label;
    o.predicted_probability = b.predicted;
    score_outcome(o, b.state, k, lambda);
    total += o.probability;
    trace.probability_residual = std::max(trace.probability_residual, std::abs(o.probability - o.predicted_probability));
    trace.max_final_entropy = std::max(trace.max_final_entropy, o.final_entropy);
    trace.outcomes.push_back(std::move(o));
  }
  trace.probability_sum_residual = std::abs(total.value() + trace.tail_mass - 1.0);
  trace.completeness_residual = stats.completeness;
  trace.shift_leak = stats.shift_leak;
  trace.completeness_bound = std::max(tail_bound, 1e-12);
  trace.deterministic = !trace.outcomes.empty() &&
                        std::all_of(trace.outcomes.begin(), trace.outcomes.end(),
                                    [](const ProtocolOutcome& o) { return o.fidelity >= 1.0 - kFidelityTol; });
  if (trace.completeness_residual > trace.completeness_bound) {
    std::ostringstream os;
    os << trace.protocol << ": completeness residual " << trace.completeness_residual << " exceeds bound "
       << trace.completeness_bound;
    throw Error(ErrorKind::ProtocolInconsistent, os.str());
  }
}

void check_lambda_range(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidParameter, "lambda outside [0, 1)");
}

}  // namespace

double photocount_probability(int k, double lambda, double transmissivity, int l) {
  const double x = lambda * lambda;
  const double T = transmissivity;
  if (l == 0) return std::exp((k + 1.0) * (std::log1p(-x) - std::log1p(-T * x)));
  if (T >= 1.0 || x == 0.0) return 0.0;
  const double log_p = l * (std::log1p(-T) + std::log(x)) + log_binomial(k + l, l) + (k + 1.0) * std::log1p(-x) -
                       (k + l + 1.0) * std::log1p(-T * x);
  return std::exp(log_p);
}

ProtocolTrace povm_reduce(int k, int delta_k, double lambda, std::optional<std::size_t> N, double eps) {
  if (k < 0 || delta_k < 0) throw Error(ErrorKind::InvalidParameter, "need k >= 0 and delta_k >= 0");
  check_lambda_range(lambda);
  const std::size_t n_max = N.value_or(auto_truncation(static_cast<std::size_t>(k + delta_k), lambda, eps));
  const Index bob = static_cast<Index>(n_max + 1);

  ProtocolTrace trace;
  trace.protocol = "povm_reduce";
  trace.bob_levels = static_cast<std::size_t>(bob);
  trace.tail_mass = schmidt_tail(static_cast<std::size_t>(k + delta_k), lambda, n_max);
  const MatrixXd initial = fock_output(k + delta_k, lambda, bob, bob + k + delta_k);
  trace.initial_entropy = spectrum_entropy(initial);

  StageStats stats;
  std::vector<Branch> branches;
  if (delta_k == 0) {
    branches.push_back({"m=0", initial, 1.0});
  } else {
    branches = run_povm(initial, k, delta_k, lambda, "", 1.0, stats);
  }
  finish(trace, branches, k, lambda, stats, trace.tail_mass);
  return trace;
}

ProtocolTrace bs_attenuate(int k, double lambda, double lambda_prime, std::optional<std::size_t> N, double eps) {
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "k must be >= 0");
  check_lambda_range(lambda);
  if (!(lambda_prime >= 0.0 && lambda_prime < lambda)) {
    throw Error(ErrorKind::InvalidParameter, "need 0 <= lambda' < lambda");
  }
  const double T = (lambda_prime * lambda_prime) / (lambda * lambda);
  const std::size_t n_max = N.value_or(auto_truncation(static_cast<std::size_t>(k), lambda, eps));
  const Index bob = static_cast<Index>(n_max + 1);
  const Index alice = bob + k;

  ProtocolTrace trace;
  trace.protocol = "bs_attenuate";
  trace.bob_levels = static_cast<std::size_t>(bob);
  trace.tail_mass = schmidt_tail(static_cast<std::size_t>(k), lambda, n_max);
  const MatrixXd initial = fock_output(k, lambda, bob, alice);
  trace.initial_entropy = spectrum_entropy(initial);

  // Kraus operators of "mix with vacuum C, count l photons in C":
  // K_l |n> = sqrt(binom(n, l)) T^((n-l)/2) (1-T)^(l/2) |n-l>
  StageStats stats;
  MatrixXd completeness = MatrixXd::Zero(bob, bob);
  std::vector<Branch> finals;
  for (Index l = 0; l < bob; ++l) {
    MatrixXd kraus = MatrixXd::Zero(bob, bob);
    for (Index n = l; n < bob; ++n) {
      double amp = std::exp(0.5 * log_binomial(static_cast<double>(n), static_cast<double>(l)));
      amp *= std::pow(T, 0.5 * static_cast<double>(n - l)) * std::pow(1.0 - T, 0.5 * static_cast<double>(l));
      kraus(n - l, n) = amp;
    }
    completeness.noalias() += kraus.transpose() * kraus;
    if (kraus.isZero(0.0)) continue;

    MatrixXd branch = initial * kraus.transpose();
    const double prob_l = photocount_probability(k, lambda, T, static_cast<int>(l));
    const std::string label = "l=" + std::to_string(l);
    if (l == 0) {
      finals.push_back({label, std::move(branch), prob_l});
      continue;
    }
    // the counted state is |Psi^(k+l)_lambda'>; Bob levels beyond N-l are empty
    const double norm2 = branch.squaredNorm();
    if (norm2 <= 0.0) continue;
    const MatrixXd trimmed = branch.leftCols(bob - l);
    std::vector<Branch> sub = run_povm(trimmed, k, static_cast<int>(l), lambda_prime, label + ",", prob_l, stats);
    for (Branch& b : sub) finals.push_back(std::move(b));
  }
  for (Index i = 0; i < bob; ++i) {
    for (Index j = 0; j < bob; ++j) {
      stats.completeness = std::max(stats.completeness, std::abs(completeness(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  finish(trace, finals, k, lambda_prime, stats, trace.tail_mass);
  return trace;
}

}  // namespace gmoe
