#include "gmoe/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

MajorizationVerdict majorizes(const ProbabilityVector& p, const ProbabilityVector& q, double eta) {
  for (const ProbabilityVector* v : {&p, &q}) {
    if (v->normalization_residual() > 1e-10) {
      std::ostringstream os;
      os << "vector sums to " << v->total() << " with tail " << v->tail_mass();
      throw Error(ErrorKind::InvalidDistribution, os.str());
    }
    if (v->tail_mass() >= eta) {
      std::ostringstream os;
      os << "tail mass " << v->tail_mass() << " >= eta = " << eta;
      throw Error(ErrorKind::InconclusiveTruncation, os.str());
    }
  }
  const ProbabilityVector ps = p.sorted_descending();
  const ProbabilityVector qs = q.sorted_descending();
  const std::size_t len = std::max(ps.size(), qs.size());

  MajorizationVerdict v;
  v.margin = std::numeric_limits<double>::infinity();
  CompensatedSum prefix_p;
  CompensatedSum prefix_q;
  for (std::size_t m = 0; m < len; ++m) {
    prefix_p += ps[m];
    prefix_q += qs[m];
    const double gap = prefix_p.value() - prefix_q.value();
    v.margin = std::min(v.margin, gap);
    if (gap < -eta && !v.first_violation) v.first_violation = m + 1;
  }
  if (len == 0) v.margin = 0.0;
  v.holds = v.margin >= -eta;
  return v;
}

std::vector<double> TransferMatrix::apply(const ProbabilityVector& p) const {
  const Eigen::Index n = size();
  Eigen::VectorXd in = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) in(i) = p[static_cast<std::size_t>(i)];
  const Eigen::VectorXd out = entries * in;
  return {out.data(), out.data() + out.size()};
}

TransferMatrix build_D(int delta_k, double lambda, std::size_t N) {
  if (delta_k < 1) throw Error(ErrorKind::InvalidParameter, "delta_k must be >= 1");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidParameter, "lambda outside [0, 1)");
  const double x = lambda * lambda;
  const Eigen::Index size = static_cast<Eigen::Index>(N + 1);

  // the matrix is Toeplitz: entry depends on the offset j = n - m only
  std::vector<double> by_offset(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    if (x == 0.0) {
      by_offset[j] = j == 0 ? 1.0 : 0.0;
      continue;
    }
    const double dj = static_cast<double>(j);
    const double log_w = delta_k * std::log1p(-x) + log_binomial(dj + delta_k - 1, delta_k - 1) + dj * std::log(x);
    by_offset[j] = std::exp(log_w);
  }

  TransferMatrix d;
  d.entries = Eigen::MatrixXd::Zero(size, size);
  d.column_tail.resize(N + 1);
  for (Eigen::Index m = 0; m < size; ++m) {
    for (Eigen::Index n = m; n < size; ++n) d.entries(n, m) = by_offset[static_cast<std::size_t>(n - m)];
    // column m keeps offsets 0..N-m
    d.column_tail[static_cast<std::size_t>(m)] =
        negative_binomial_tail(x, delta_k, static_cast<long>(N) - static_cast<long>(m));
  }
  return d;
}

IncompleteBeta incomplete_beta(double z, int a, int b) {
  if (!(z >= 0.0 && z <= 1.0)) throw Error(ErrorKind::InvalidParameter, "z outside [0, 1]");
  if (a < 0 || b < 1) throw Error(ErrorKind::InvalidParameter, "incomplete beta needs a >= 0, b >= 1");
  IncompleteBeta res;
  res.regularized = regularized_beta_int(z, a, b);
  res.scaled = scaled_regularized_beta_int(z, a, b);
  if (a == 0) {
    res.value = z > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    // complete beta (a-1)!(b-1)!/(a+b-1)!
    const double log_complete = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    res.value = std::exp(log_complete) * res.regularized;
  }
  return res;
}

TransferMatrix build_R(int k, double lambda, double lambda_prime, std::size_t N) {
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "k must be >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidParameter, "lambda outside (0, 1)");
  if (!(lambda_prime >= 0.0 && lambda_prime < lambda)) {
    std::ostringstream os;
    os << "need 0 <= lambda' < lambda, got lambda' = " << lambda_prime << ", lambda = " << lambda;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
  const double x = lambda * lambda;
  const double z = lambda_prime * lambda_prime;
  const double kk = static_cast<double>(k);
  const double log_ratio = (kk + 1.0) * (std::log1p(-x) - std::log1p(-z));
  const Eigen::Index size = static_cast<Eigen::Index>(N + 1);

  // Q_n = l'^(-2n) I_z(n, k+1), needed for n = 0..N+1
  std::vector<double> q(N + 2);
  for (std::size_t n = 0; n <= N + 1; ++n) q[n] = incomplete_beta(z, static_cast<int>(n), k + 1).scaled;

  auto binom_k = [&](double m) { return std::exp(log_binomial(m + kk, kk)); };

  TransferMatrix r;
  r.entries = Eigen::MatrixXd::Zero(size, size);
  r.column_tail.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double dn = static_cast<double>(n);
    const double prefactor = std::exp(log_ratio - log_binomial(dn + kk, dn));
    for (std::size_t m = 0; n + m <= N; ++m) {
      const double dm = static_cast<double>(m);
      double value;
      if (m == 0) {
        value = prefactor * q[n];
      } else {
        const double bracket = binom_k(dm) * q[n] * x - binom_k(dm - 1.0) * q[n + 1] * z;
        value = prefactor * bracket * std::pow(x, dm - 1.0);
      }
      r.entries(static_cast<Eigen::Index>(n + m), static_cast<Eigen::Index>(n)) = value;
    }
    // offsets m > M = N - n are dropped:
    //   sum_{m>M} binom(m+k,k) x^m     = (1-x)^-(k+1) I_x(M+1, k+1)
    //   sum_{m>M} binom(m-1+k,k) x^(m-1) = (1-x)^-(k+1) I_x(M, k+1)
    const long M = static_cast<long>(N - n);
    const double inv_norm = std::exp(-(kk + 1.0) * std::log1p(-x));
    const double first = q[n] * inv_norm * regularized_beta_int(x, M + 1, k + 1);
    const double second = z * q[n + 1] * inv_norm * regularized_beta_int(x, M, k + 1);
    r.column_tail[n] = prefactor * (first - second);
  }
  return r;
}

TransferReport verify_transfer(const TransferMatrix& m, const ProbabilityVector& p_in,
                               const ProbabilityVector& p_out, const TransferTolerances& tol) {
  TransferReport rep;
  const Eigen::Index size = m.size();
  rep.min_entry = size > 0 ? m.entries.minCoeff() : 0.0;
  for (Eigen::Index j = 0; j < size; ++j) {
    CompensatedSum col;
    for (Eigen::Index i = 0; i < size; ++i) col += m.entries(i, j);
    const double tail = static_cast<std::size_t>(j) < m.column_tail.size()
                            ? m.column_tail[static_cast<std::size_t>(j)]
                            : 0.0;
    rep.max_column_deficit = std::max(rep.max_column_deficit, std::abs(col.value() + tail - 1.0));
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    CompensatedSum row;
    for (Eigen::Index j = 0; j < size; ++j) row += m.entries(i, j);
    rep.max_row_sum = std::max(rep.max_row_sum, row.value());
  }

  const std::vector<double> mapped = m.apply(p_in);
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    rep.mapping_residual = std::max(rep.mapping_residual, std::abs(mapped[i] - p_out[i]));
  }
  std::vector<double> clipped(mapped);
  for (double& v : clipped) v = std::max(v, 0.0);
  rep.entropy_delta = entropy(ProbabilityVector(std::move(clipped))).value - entropy(p_in).value;

  rep.nonnegative = rep.min_entry >= tol.min_entry;
  rep.columns_ok = rep.max_column_deficit <= tol.column;
  rep.rows_ok = rep.max_row_sum <= 1.0 + tol.row;
  rep.mapping_ok = rep.mapping_residual <= tol.mapping;
  rep.entropy_ok = rep.entropy_delta >= -tol.entropy;
  return rep;
}

}  // namespace gmoe
