#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace gmoe {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

/// log binom(n, k) through log-gamma; valid for 0 <= k <= n.
double log_binomial(double n, double k) noexcept;

/// binom(n, k) as a double, -inf..inf safe for moderate arguments.
double binomial(double n, double k) noexcept;

/// Regularized incomplete beta I_z(a, b) for integer a >= 0, b >= 1 using the
/// finite sum  sum_{j=a}^{a+b-1} binom(a+b-1, j) z^j (1-z)^(a+b-1-j).
/// Every term is nonnegative, so the result carries no cancellation.
double regularized_beta_int(double z, long a, long b) noexcept;

/// z^(-a) I_z(a, b) for integer a >= 0, b >= 1, evaluated without forming
/// z^(-a): sum_{i=0}^{b-1} binom(a+b-1, a+i) z^i (1-z)^(b-1-i).
double scaled_regularized_beta_int(double z, long a, long b) noexcept;

/// Upper tail P(X > N) of the negative binomial law
/// P(X = n) = binom(n+r-1, n) (1-x)^r x^n, i.e. I_x(N+1, r).
double negative_binomial_tail(double x, long r, long N) noexcept;

}  // namespace gmoe
