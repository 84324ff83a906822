#include "gmoe/numeric.hpp"

#include <limits>

namespace gmoe {

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

namespace {

constexpr double kProductLimit = 300.0;

// binom(n, kk) as a running product over kk = min(k, n - k) factors
long double binomial_product(double n, double kk) noexcept {
  long double c = 1.0L;
  for (int i = 1; i <= static_cast<int>(kk); ++i) c = c * (static_cast<long double>(n) - kk + i) / i;
  return c;
}

bool integral(double x) noexcept { return std::floor(x) == x; }

}  // namespace

double log_binomial(double n, double k) noexcept {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  const double kk = std::min(k, n - k);
  if (integral(n) && integral(k) && kk <= kProductLimit) {
    return static_cast<double>(std::log(binomial_product(n, kk)));
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(double n, double k) noexcept {
  if (k < 0 || k > n) return 0.0;
  const double kk = std::min(k, n - k);
  if (integral(n) && integral(k) && kk <= kProductLimit) {
    const long double c = binomial_product(n, kk);
    return n <= 60 ? static_cast<double>(std::round(c)) : static_cast<double>(c);
  }
  return std::exp(log_binomial(n, k));
}

namespace {

// binom(n, j) z^e1 (1-z)^e2 in log space; handles z in {0, 1} exactly
double binomial_term(long n, long j, double z, long e1, long e2) noexcept {
  if (e1 > 0 && z == 0.0) return 0.0;
  if (e2 > 0 && z == 1.0) return 0.0;
  double log_term = log_binomial(static_cast<double>(n), static_cast<double>(j));
  if (e1 > 0) log_term += static_cast<double>(e1) * std::log(z);
  if (e2 > 0) log_term += static_cast<double>(e2) * std::log1p(-z);
  return std::exp(log_term);
}

}  // namespace

double regularized_beta_int(double z, long a, long b) noexcept {
  const long n = a + b - 1;
  CompensatedSum acc;
  for (long j = a; j <= n; ++j) acc += binomial_term(n, j, z, j, n - j);
  return acc.value();
}

double scaled_regularized_beta_int(double z, long a, long b) noexcept {
  const long n = a + b - 1;
  CompensatedSum acc;
  for (long i = 0; i <= b - 1; ++i) acc += binomial_term(n, a + i, z, i, b - 1 - i);
  return acc.value();
}

double negative_binomial_tail(double x, long r, long N) noexcept {
  if (x <= 0.0) return 0.0;
  return regularized_beta_int(x, N + 1, r);
}

}  // namespace gmoe
