// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "gmoe/channel.hpp"
#include "gmoe/explore.hpp"
#include "gmoe/locc.hpp"
#include "gmoe/majorization.hpp"
#include "gmoe/squeezer.hpp"
#include "oracles.hpp"

using namespace gmoe;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "exception: " << e.what() << "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs >= limit_seconds) {
    o.ok = false;
    o.detail << "runtime " << secs << " s over the " << limit_seconds << " s limit; ";
  }
  if (!o.ok) ++failures;
  std::printf("[%s] %2d %-34s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", id, title, secs, o.detail.str().c_str());
  std::fflush(stdout);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

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

}  // namespace

int main() {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());

  criterion(1, "decomposition identities", 1.0, [](Outcome& o) {
    double worst_tau = 0, worst_noise = 0, worst_moment = 0;
    int limiting[3] = {0, 0, 0};
    for (int i = 0; i < 20; ++i) {
      const double tau = 0.1 * (i + 1);
      for (int j = 0; j < 20; ++j) {
        double noise = std::abs(tau - 1.0) + 0.25 * j;
        if (tau == 1.0 && j > 0) noise = 2.0 * (0.25 * j);
        const ChannelDecomposition d = decompose({tau, noise});
        if (j == 0 && tau < 1.0) ++limiting[0];
        if (j == 0 && tau > 1.0) ++limiting[1];
        if (tau == 1.0 && j > 0) ++limiting[2];
        worst_tau = std::max(worst_tau, std::abs(d.transmissivity * d.gain - tau));
        worst_noise = std::max(worst_noise, std::abs(d.gain * (1 - d.transmissivity) + (d.gain - 1) - noise));
        GaussianMoments in;
        in.mean = {0.7, -0.3};
        in.cov << 1.8, 0.2, 0.2, 1.3;
        const GaussianMoments staged =
            moment_map(moment_map(in, {d.transmissivity, 1 - d.transmissivity}), {d.gain, d.gain - 1});
        const GaussianMoments direct = moment_map(in, {tau, noise});
        for (int a = 0; a < 2; ++a) {
          worst_moment = std::max(worst_moment, rel_diff(staged.mean[a], direct.mean[a]));
          for (int b = 0; b < 2; ++b) worst_moment = std::max(worst_moment, rel_diff(staged.cov(a, b), direct.cov(a, b)));
        }
      }
    }
    o.require(worst_tau <= 1e-12, "T*G = tau");
    o.require(worst_noise <= 1e-12, "G(1-T)+(G-1) = n");
    o.require(worst_moment <= 1e-14, "moment composition");
    o.require(limiting[0] > 0 && limiting[1] > 0 && limiting[2] > 0, "limiting cases present");
    o.detail << "max|TG-tau|=" << worst_tau << " max|n err|=" << worst_noise << " moment rel=" << worst_moment;
  });

  criterion(2, "Schmidt spectrum oracle", 10.0, [](Outcome& o) {
    double worst = 0;
    for (double lambda : {0.3, 0.6, 0.9}) {
      for (int k = 0; k <= 8; ++k) {
        const BipartiteAmplitudeMatrix m =
            output_state(FockState::number(k), SqueezeParam::from_lambda(lambda).r(), std::nullopt, 1e-12);
        const ProbabilityVector s = schmidt_spectrum(m);
        auto ref = oracle::schmidt(k, lambda, static_cast<int>(m.b_dim()) - 1);
        std::sort(ref.begin(), ref.end(), std::greater<>());
        for (std::size_t n = 0; n < ref.size(); ++n) worst = std::max(worst, std::abs(s[n] - ref[n]));
      }
    }
    o.require(worst <= 1e-12, "entrywise spectrum");
    o.detail << "max entry error=" << worst;
  });

  criterion(3, "transfer-matrix identities", 30.0, [](Outcome& o) {
    double d_map = 0, d_pow = 0, r_map = 0;
    bool stochastic = true;
    for (double lambda : {0.3, 0.6, 0.9}) {
      for (std::size_t k = 0; k <= 8; ++k) {
        const std::size_t N = auto_truncation(k + 1, lambda);
        const TransferMatrix d = build_D(1, lambda, N);
        const TransferReport rep = verify_transfer(d, schmidt_vector(k, lambda, N), schmidt_vector(k + 1, lambda, N));
        d_map = std::max(d_map, rep.mapping_residual);
        stochastic = stochastic && rep.stochastic();
      }
      const std::size_t N = auto_truncation(5, lambda);
      const TransferMatrix d1 = build_D(1, lambda, N);
      Eigen::MatrixXd power = d1.entries;
      for (int dk = 2; dk <= 4; ++dk) {
        power = power * d1.entries;
        const TransferMatrix dk_mat = build_D(dk, lambda, N);
        d_pow = std::max(d_pow, (dk_mat.entries - power).cwiseAbs().maxCoeff());
        stochastic = stochastic && verify_transfer(dk_mat, schmidt_vector(0, lambda, N),
                                                   schmidt_vector(static_cast<std::size_t>(dk), lambda, N))
                                       .stochastic();
      }
    }
    for (int k = 0; k <= 5; ++k) {
      for (double lambda : {0.5, 0.8}) {
        const std::size_t N = auto_truncation(static_cast<std::size_t>(k), lambda);
        const TransferMatrix r = build_R(k, lambda, 0.2, N);
        const TransferReport rep = verify_transfer(r, schmidt_vector(k, 0.2, N), schmidt_vector(k, lambda, N));
        r_map = std::max(r_map, rep.mapping_residual);
        stochastic = stochastic && rep.stochastic();
      }
    }
    o.require(d_map <= 1e-12, "D p^(k) = p^(k+1)");
    o.require(d_pow <= 1e-12, "D^(dk) = D^dk");
    o.require(r_map <= 1e-10, "R p^(k)(l') = p^(k)(l)");
    o.require(stochastic, "column-stochastic with analytic tails");
    o.detail << "D map=" << d_map << " D power=" << d_pow << " R map=" << r_map;
  });

  criterion(4, "majorization chains", 5.0, [](Outcome& o) {
    double worst = 1e300;
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.05 + 0.1 * i);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t k = 0; k <= 10; ++k) {
        worst = std::min(worst, majorizes(schmidt_vector(k, grid[i]), schmidt_vector(k + 1, grid[i])).margin);
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
          worst = std::min(worst, majorizes(schmidt_vector(k, grid[i]), schmidt_vector(k, grid[j])).margin);
        }
      }
    }
    o.require(worst >= -1e-9, "margin >= -1e-9");
    o.detail << "worst margin=" << worst;
  });

  criterion(5, "infinitesimal regime scaling", 0.0, [](Outcome& o) {
    for (std::size_t k : {0, 1, 3}) {
      const double d1 = infinitesimal_approx(FockState::number(k), 0.02).deviation;
      const double d2 = infinitesimal_approx(FockState::number(k), 0.01).deviation;
      const double d3 = infinitesimal_approx(FockState::number(k), 0.005).deviation;
      const double a = d1 / d2, b = d2 / d3;
      o.require(std::abs(a - 4) <= 0.5 && std::abs(b - 4) <= 0.5, "ratio 4 +- 0.5 for |" + std::to_string(k) + ">");
      o.detail << "|" << k << ">: " << a << ", " << b << "  ";
    }
  });

  criterion(6, "Fock-state entanglement table", 0.0, [](Outcome& o) {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(0.05 * i);
    const FockScanTable t = fock_scan(5, grid, kDefaultEps, 1e-10);
    double worst = 0;
    for (const FockScanRow& row : t.rows) {
      if (row.k != 0) continue;
      const double c2 = std::cosh(row.r) * std::cosh(row.r), s2 = std::sinh(row.r) * std::sinh(row.r);
      const double closed = row.r == 0.0 ? 0.0 : c2 * std::log(c2) - s2 * std::log(s2);
      worst = std::max(worst, std::abs(row.entanglement - closed));
    }
    o.require(t.monotone_in_r, "strictly increasing in r");
    o.require(t.monotone_in_k, "strictly increasing in k");
    o.require(worst <= 1e-8, "k = 0 closed form");
    o.detail << "min step r=" << t.min_step_r << " min step k=" << t.min_step_k << " k=0 err=" << worst;
  });

  criterion(7, "counterexample crossing", 5.0, [](Outcome& o) {
    const std::vector<cplx> amps{{0, 0}, {std::sqrt(0.4), 0}, {std::sqrt(0.6), 0}};
    const FockState a = normalize(amps);
    const FockState b = FockState::number(1);
    const CrossingResult c = crossing_finder(a, b, 0.3, 1.2, 1e-8);
    o.require(c.r_star.has_value(), "crossing found");
    if (!c.r_star) return;
    const double r = *c.r_star;
    o.require(r >= 0.70 && r <= 0.80, "r* in [0.70, 0.80]");
    const double before = entanglement_difference(a, b, r - 0.02);
    const double after = entanglement_difference(a, b, r + 0.02);
    o.require(before > 0 && after < 0, "order flips across r*");
    o.detail << "r*=" << r << " E_a-E_b: " << before << " -> " << after;
  });

  criterion(8, "random vacuum-majorization scan", 120.0, [hw](Outcome& o) {
    ScanConfig cfg;
    cfg.dim = 21;
    cfg.count = 1000;
    cfg.r = 1.0;
    cfg.seed = 20240521;
    cfg.eta = 1e-9;
    const ScanReport a = random_majorization_scan(cfg);
    cfg.threads = hw;
    const ScanReport b = random_majorization_scan(cfg);
    o.require(a.checked == 1000 && a.inconclusive == 0, "all samples conclusive");
    o.require(a.violations == 0, "no violations");
    o.require(a == b, "rerun bit-identical");
    o.detail << "violations=" << a.violations << " worst margin=" << a.worst_margin
             << " mean<n>=" << a.mean_photon_avg;
  });

  criterion(9, "LOCC determinism", 0.0, [](Outcome& o) {
    double worst_prob = 0, worst_fid = 1, worst_complete = 0;
    for (int k = 0; k <= 3; ++k) {
      for (int dk = 0; dk <= 2; ++dk) {
        for (double lambda : {0.3, 0.6}) {
          const ProtocolTrace t = povm_reduce(k, dk, lambda);
          o.require(t.completeness_residual <= t.completeness_bound, "reduce completeness");
          o.require(t.deterministic, "reduce deterministic");
          const double x = lambda * lambda;
          for (const ProtocolOutcome& out : t.outcomes) {
            const int m = std::stoi(out.label.substr(2));
            const double w = dk == 0 ? (m == 0 ? 1.0 : 0.0)
                                     : std::pow(1 - x, dk) * std::pow(x, m) *
                                           std::exp(std::lgamma(m + dk) - std::lgamma(m + 1.0) - std::lgamma(dk * 1.0));
            worst_prob = std::max(worst_prob, std::abs(out.probability - w));
            worst_fid = std::min(worst_fid, out.fidelity);
          }
          worst_complete = std::max(worst_complete, t.completeness_residual);
        }
      }
      const double lambda = 0.6, lp = 0.3;
      const ProtocolTrace t = bs_attenuate(k, lambda, lp);
      o.require(t.completeness_residual <= t.completeness_bound, "attenuate completeness");
      o.require(t.deterministic, "attenuate deterministic");
      std::vector<double> per_l(t.bob_levels, 0.0);
      for (const ProtocolOutcome& out : t.outcomes) {
        per_l[std::stoul(out.label.substr(2))] += out.probability;
        worst_prob = std::max(worst_prob, std::abs(out.probability - out.predicted_probability));
        worst_fid = std::min(worst_fid, out.fidelity);
      }
      for (int l = 0; l <= 15; ++l) {
        worst_prob = std::max(worst_prob, std::abs(per_l[l] - photocount_brute(k, lambda, lp * lp / (lambda * lambda), l)));
      }
      worst_complete = std::max(worst_complete, t.completeness_residual);
    }
    o.require(worst_prob <= 1e-10, "outcome distributions");
    o.require(worst_fid >= 1 - 1e-9, "branch fidelity");
    o.detail << "prob err=" << worst_prob << " min fidelity=" << worst_fid << " completeness=" << worst_complete;
  });

  criterion(10, "channel simulator cross-check", 0.0, [](Outcome& o) {
    const std::vector<ChannelParams> params{{1.0, 2.0}, {0.5, 1.0}, {2.0, 1.5}};
    double worst = 0;
    for (const ChannelParams& p : params) {
      const DensityMatrix out = apply_channel(DensityMatrix::pure(FockState::number(0)), p);
      const double s = entropy(spectrum(out)).value;
      const double x = (p.tau + p.noise - 1) / 2;
      worst = std::max(worst, std::abs(s - ((x + 1) * std::log(x + 1) - x * std::log(x))));
    }
    o.require(worst <= 1e-6, "vacuum entropy vs symplectic oracle");
    double worst_gap = 1e300;
    for (const ChannelParams& p : params) {
      const double floor = entropy(spectrum(apply_amp(DensityMatrix::pure(FockState::number(0)), decompose(p).gain))).value;
      for (std::uint64_t i = 0; i < 100; ++i) {
        const FockState phi = random_state(12, derive_seed(99, i));
        const double s = entropy(spectrum(apply_channel(DensityMatrix::pure(phi), p))).value;
        worst_gap = std::min(worst_gap, s - floor);
      }
    }
    o.require(worst_gap >= -1e-9, "reduction inequality");
    o.detail << "vacuum entropy err=" << worst << " min S(M(phi))-S(A(0))=" << worst_gap;
  });

  criterion(11, "entropy search", 120.0, [](Outcome& o) {
    const SearchResult a = minimize_entropy(8, 0.8, 32, 7, 0.0);
    const SearchResult b = minimize_entropy(8, 0.8, 32, 7, 0.0);
    o.require(a.vacuum_gap >= -1e-6, "vacuum_gap >= -1e-6");
    bool same = a.best_entropy == b.best_entropy && a.per_restart_history.size() == b.per_restart_history.size();
    for (std::size_t i = 0; same && i < a.per_restart_history.size(); ++i) {
      same = a.per_restart_history[i].entropy == b.per_restart_history[i].entropy;
    }
    o.require(same, "deterministic per seed");
    o.detail << "vacuum_gap=" << a.vacuum_gap << " best=" << a.best_entropy << " vacuum=" << a.vacuum_entropy;
  });

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
