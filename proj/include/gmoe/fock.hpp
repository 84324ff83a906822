#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gmoe {

using cplx = std::complex<double>;

/// Unit-norm pure state of one bosonic mode, truncated to photon numbers
/// 0..dim-1. Amplitudes beyond dim are zero.
class FockState {
 public:
  /// Number state |k>, padded with zeros up to `dim` (at least k+1).
  static FockState number(std::size_t k, std::size_t dim = 0);

  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  cplx operator[](std::size_t n) const noexcept { return n < amps_.size() ? amps_[n] : cplx{}; }

  /// Largest n with a nonzero amplitude.
  std::size_t max_photon() const noexcept;

  friend FockState normalize(std::span<const cplx> amplitudes);

 private:
  explicit FockState(std::vector<cplx> amps) : amps_(std::move(amps)) {}
  std::vector<cplx> amps_;
};

/// Rescales to unit norm. Throws DegenerateState for an all-zero input.
FockState normalize(std::span<const cplx> amplitudes);

struct StateMoments {
  double mean_photon = 0.0;  // <n>
  cplx mean_lowering{};      // <a>

  bool zero_mean(double tol = 1e-10) const noexcept { return std::abs(mean_lowering) <= tol; }
};

StateMoments state_moments(const FockState& state);

/// Nonnegative weights plus the mass known (or bounded) to lie outside the
/// stored entries.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  /// Entries above -1e-10 are accepted (and clamped to zero); anything more
  /// negative, or a negative tail, raises InvalidDistribution.
  explicit ProbabilityVector(std::vector<double> probs, double tail_mass = 0.0);

  std::span<const double> probs() const noexcept { return probs_; }
  double tail_mass() const noexcept { return tail_mass_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return i < probs_.size() ? probs_[i] : 0.0; }

  /// Compensated sum of the stored entries.
  double total() const noexcept;
  /// |total + tail - 1|
  double normalization_residual() const noexcept;

  /// Copy sorted descending, ties broken by original index.
  ProbabilityVector sorted_descending() const;

 private:
  std::vector<double> probs_;
  double tail_mass_ = 0.0;
};

/// Amplitudes M[a, b] of sum_ab M[a,b] |a>_A |b>_B. `tail_mass` records joint
/// mass omitted by truncation (zero for an explicitly given matrix).
struct BipartiteAmplitudeMatrix {
  Eigen::MatrixXcd entries;
  double tail_mass = 0.0;

  Eigen::Index a_dim() const noexcept { return entries.rows(); }
  Eigen::Index b_dim() const noexcept { return entries.cols(); }
};

/// Hermitian, positive, unit-trace operator in the Fock basis.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix pure(const FockState& state);

  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  double trace() const noexcept { return entries_.trace().real(); }
  double hermiticity_residual() const noexcept;
  double min_eigenvalue() const;

  /// Throws InvalidState unless Hermitian to 1e-12, trace 1 to `trace_tol`
  /// and eigenvalues >= -1e-10.
  void validate(double trace_tol = 1e-10) const;

 private:
  Eigen::MatrixXcd entries_;
};

/// Squared singular values of M, sorted descending. tail_mass is carried over
/// from M. Throws InvalidState if sum |M|^2 + tail differs from 1 by > 1e-10.
ProbabilityVector schmidt_spectrum(const BipartiteAmplitudeMatrix& m);

/// Eigenvalues of rho, descending; tail_mass = max(0, 1 - trace).
ProbabilityVector spectrum(const DensityMatrix& rho);

enum class EntropyUnit { Nats, Bits };

struct EntropyValue {
  double value = 0.0;
  /// Upper bound on the entropy carried by the omitted tail.
  double tail_bound = 0.0;
};

/// Support size assumed for omitted tail mass when bounding its entropy.
inline constexpr double kTailSupport = 1e6;

/// -sum p log p with 0 log 0 = 0.
EntropyValue entropy(const ProbabilityVector& p, EntropyUnit unit = EntropyUnit::Nats);

}  // namespace gmoe
