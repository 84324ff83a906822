#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "gmoe/error.hpp"
#include "gmoe/locc.hpp"
#include "gmoe/squeezer.hpp"
#include "oracles.hpp"

using namespace gmoe;
using oracle::error_kind;

namespace {

// P(l) from the beam-splitter amplitudes: photon n on Bob's mode leaves l
// photons in the ancilla with probability binom(n, l) T^(n-l) (1-T)^l.
double photocount_brute(int k, double lambda, double t, int l) {
  const auto p = oracle::schmidt(k, lambda, 4000);
  long double sum = 0;
  for (int n = l; n < static_cast<int>(p.size()); ++n) {
    const long double logc = std::lgamma(n + 1.0L) - std::lgamma(l + 1.0L) - std::lgamma(n - l + 1.0L);
    sum += p[n] * std::exp(logc + (n - l) * std::log(static_cast<long double>(t)) +
                           l * std::log1p(-static_cast<long double>(t)));
  }
  return static_cast<double>(sum);
}

int label_value(const std::string& label, const std::string& key) {
  const auto pos = label.find(key + "=");
  if (pos == std::string::npos) return -1;
  return std::stoi(label.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("reduce k=0 by one photon") {
  const double lambda = 0.5;
  const ProtocolTrace t = povm_reduce(0, 1, lambda);
  CHECK(t.deterministic);
  CHECK(t.completeness_residual <= t.completeness_bound);
  for (const ProtocolOutcome& o : t.outcomes) {
    const int m = label_value(o.label, "m");
    CHECK(std::abs(o.fidelity - 1.0) < 1e-10);
    CHECK(std::abs(o.probability - (1 - lambda * lambda) * std::pow(lambda * lambda, m)) < 1e-10);
  }
}

TEST_CASE("reduce without squeezing has one outcome") {
  const ProtocolTrace t = povm_reduce(1, 2, 0.0);
  REQUIRE(t.outcomes.size() == 1);
  CHECK(t.outcomes[0].label == "m=0");
  CHECK(t.outcomes[0].probability == doctest::Approx(1.0));
  CHECK(t.deterministic);
}

TEST_CASE("reduce outcome weights follow the negative binomial law") {
  for (int k = 0; k <= 3; ++k) {
    for (int dk = 0; dk <= 2; ++dk) {
      for (double lambda : {0.3, 0.6}) {
        const ProtocolTrace t = povm_reduce(k, dk, lambda);
        CHECK(t.deterministic);
        CHECK(t.completeness_residual <= t.completeness_bound);
        CHECK(t.probability_sum_residual < 1e-9);
        CHECK(t.shift_leak == 0.0);
        const double x = lambda * lambda;
        for (const ProtocolOutcome& o : t.outcomes) {
          const int m = label_value(o.label, "m");
          const double w = dk == 0 ? (m == 0 ? 1.0 : 0.0)
                                   : std::pow(1 - x, dk) * std::exp(std::lgamma(m + dk) - std::lgamma(m + 1.0) -
                                                                    std::lgamma(static_cast<double>(dk))) *
                                         std::pow(x, m);
          CHECK(std::abs(o.probability - w) < 1e-10);
          CHECK(std::abs(o.predicted_probability - w) < 1e-12);
          CHECK(o.fidelity >= 1 - kFidelityTol);
          CHECK(o.final_entropy <= t.initial_entropy + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("photocount law against brute force") {
  const double lambda = 0.6, lp = 0.3;
  const double t = lp * lp / (lambda * lambda);
  CHECK(photocount_probability(0, lambda, t, 0) ==
        doctest::Approx((1 - lambda * lambda) / (1 - t * lambda * lambda)).epsilon(1e-14));
  for (int k = 0; k <= 3; ++k) {
    long double total = 0;
    for (int l = 0; l <= 15; ++l) {
      const double p = photocount_probability(k, lambda, t, l);
      CHECK(std::abs(p - photocount_brute(k, lambda, t, l)) < 1e-10);
    }
    for (int l = 0; l <= 400; ++l) total += photocount_probability(k, lambda, t, l);
    CHECK(std::abs(static_cast<double>(total) - 1.0) < 1e-10);
  }
}

TEST_CASE("attenuation protocol") {
  for (int k = 0; k <= 3; ++k) {
    for (double lambda : {0.3, 0.6}) {
      for (double lp : {0.1, 0.3}) {
        if (lp >= lambda) continue;
        const ProtocolTrace t = bs_attenuate(k, lambda, lp);
        CHECK(t.deterministic);
        CHECK(t.completeness_residual <= t.completeness_bound);
        CHECK(t.probability_residual < 1e-10);
        CHECK(t.probability_sum_residual < 1e-9);
        CHECK(t.max_final_entropy <= t.initial_entropy + 1e-9);
        const double tr = lp * lp / (lambda * lambda);
        std::map<int, double> per_count;
        for (const ProtocolOutcome& o : t.outcomes) {
          per_count[label_value(o.label, "l")] += o.probability;
          CHECK(o.fidelity >= 1 - kFidelityTol);
        }
        for (const auto& [l, p] : per_count) {
          if (l > 15) continue;
          CHECK(std::abs(p - photocount_brute(k, lambda, tr, l)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("attenuation parameter checks") {
  CHECK(error_kind([] { bs_attenuate(1, 0.3, 0.3); }) == ErrorKind::InvalidParameter);
  CHECK(error_kind([] { bs_attenuate(1, 0.3, 0.5); }) == ErrorKind::InvalidParameter);
  CHECK(error_kind([] { povm_reduce(-1, 1, 0.5); }) == ErrorKind::InvalidParameter);
}
