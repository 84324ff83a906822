#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmoe/fock.hpp"

namespace gmoe {

inline constexpr double kDefaultEta = 1e-9;

struct MajorizationVerdict {
  bool holds = true;
  /// min over m of (prefix_p(m) - prefix_q(m)) on the descending sorts.
  double margin = 0.0;
  /// First prefix length m (1-based) where the gap drops below -eta.
  std::optional<std::size_t> first_violation;
};

/// Does p majorize q? Both must be normalized to 1e-10 (InvalidDistribution
/// otherwise) and have tail_mass < eta (InconclusiveTruncation otherwise).
MajorizationVerdict majorizes(const ProbabilityVector& p, const ProbabilityVector& q, double eta = kDefaultEta);

/// Truncated (N+1)x(N+1) column-stochastic matrix together with the analytic
/// mass each column sends beyond row N.
struct TransferMatrix {
  Eigen::MatrixXd entries;
  std::vector<double> column_tail;

  Eigen::Index size() const noexcept { return entries.rows(); }
  /// entries * p, padded or cut to the matrix size. The tail of the result is
  /// left at zero; callers compare against explicit targets.
  std::vector<double> apply(const ProbabilityVector& p) const;
};

/// D^(dk)_{nm} = (1-lambda^2)^dk binom(n-m+dk-1, dk-1) lambda^(2(n-m)) for n >= m.
TransferMatrix build_D(int delta_k, double lambda, std::size_t N);

/// Incomplete beta B(z; a, b) = int_0^z x^(a-1) (1-x)^(b-1) dx for integer
/// arguments, with the pieces the transfer matrices consume.
struct IncompleteBeta {
  /// B(z; a, b); +inf for a == 0 and z > 0.
  double value = 0.0;
  /// I_z(a, b) = B(z; a, b) / B(a, b). Equals a binom(a+b-1, a) B(z; a, b),
  /// which tends to 1 as a -> 0.
  double regularized = 0.0;
  /// z^(-a) I_z(a, b), finite for every z in [0, 1].
  double scaled = 0.0;
};

/// Throws InvalidParameter for z outside [0, 1], a < 0 or b < 1.
IncompleteBeta incomplete_beta(double z, int a, int b);

/// Lower-triangular R^(k)(lambda, lambda') with p^(k)(lambda) = R p^(k)(lambda').
/// Column n holds r^(k,n):
///   r_m = binom(n+k,n)^-1 ((1-l^2)/(1-l'^2))^(k+1)
///         [L_m^(k,n) l^2 - L_(m-1)^(k,n+1) l'^2] l^(2(m-1)),
///   L_m^(k,n) = binom(m+k,k) l'^(-2n) I_{l'^2}(n, k+1).
/// Requires 0 <= lambda_prime < lambda < 1.
TransferMatrix build_R(int k, double lambda, double lambda_prime, std::size_t N);

struct TransferTolerances {
  double min_entry = -1e-14;
  double column = 1e-9;
  double row = 1e-10;
  double mapping = 1e-10;
  double entropy = 1e-10;
};

struct TransferReport {
  double max_column_deficit = 0.0;  // max_j |colsum_j + tail_j - 1|
  double min_entry = 0.0;
  double max_row_sum = 0.0;
  double mapping_residual = 0.0;  // ||M p_in - p_out||_inf
  double entropy_delta = 0.0;     // H(M p_in) - H(p_in)

  bool nonnegative = true;
  bool columns_ok = true;
  bool rows_ok = true;
  bool mapping_ok = true;
  bool entropy_ok = true;

  bool stochastic() const noexcept { return nonnegative && columns_ok && rows_ok; }
  bool passed() const noexcept { return stochastic() && mapping_ok && entropy_ok; }
};

TransferReport verify_transfer(const TransferMatrix& m, const ProbabilityVector& p_in,
                               const ProbabilityVector& p_out, const TransferTolerances& tol = {});

}  // namespace gmoe
