#include "gmoe/explore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <mutex>
#include <sstream>
#include <thread>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 over a combination of both words
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FockState random_state(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::InvalidParameter, "dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> amps(dim);
  for (cplx& c : amps) {
    const double re = normal(rng);
    const double im = normal(rng);
    c = {re, im};
  }
  return normalize(amps);
}

namespace {

using Eigen::Index;
using Eigen::VectorXcd;

VectorXcd to_vector(const FockState& s) {
  VectorXcd v(static_cast<Index>(s.dim()));
  for (std::size_t n = 0; n < s.dim(); ++n) v(static_cast<Index>(n)) = s[n];
  return v;
}

FockState to_state(const VectorXcd& v) {
  return normalize(std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())));
}

double real_dot(const VectorXcd& a, const VectorXcd& b) { return a.dot(b).real(); }

// a c and a^dagger c for the truncated lowering operator
VectorXcd lower(const VectorXcd& c) {
  VectorXcd out = VectorXcd::Zero(c.size());
  for (Index n = 0; n + 1 < c.size(); ++n) out(n) = std::sqrt(static_cast<double>(n + 1)) * c(n + 1);
  return out;
}

VectorXcd raise(const VectorXcd& c) {
  VectorXcd out = VectorXcd::Zero(c.size());
  for (Index n = 1; n < c.size(); ++n) out(n) = std::sqrt(static_cast<double>(n)) * c(n - 1);
  return out;
}

cplx mean_lowering(const VectorXcd& c) { return c.dot(lower(c)); }

VectorXcd tangent(const VectorXcd& g, const VectorXcd& c) { return g - real_dot(c, g) * c; }

}  // namespace

FockState project_zero_mean(const FockState& state, double tol) {
  VectorXcd c = to_vector(state);
  for (int it = 0; it < 200; ++it) {
    const cplx alpha = mean_lowering(c);
    if (std::abs(alpha) <= tol) return to_state(c);
    const VectorXcd ac = lower(c);
    const VectorXcd adc = raise(c);
    // gradients of Re<a> and Im<a> in the real inner product
    const VectorXcd j1 = tangent(ac + adc, c);
    const VectorXcd j2 = tangent(cplx(0, 1) * (adc - ac), c);
    Eigen::Matrix2d gram;
    gram << real_dot(j1, j1), real_dot(j1, j2), real_dot(j2, j1), real_dot(j2, j2);
    const Eigen::Vector2d rhs(alpha.real(), alpha.imag());
    const Eigen::Vector2d coef = gram.completeOrthogonalDecomposition().solve(rhs);
    c -= coef(0) * j1 + coef(1) * j2;
    c.normalize();
  }
  std::ostringstream os;
  os << "could not project onto <a> = 0 (|<a>| = " << std::abs(mean_lowering(c)) << ")";
  throw Error(ErrorKind::PreconditionViolated, os.str());
}

// ---------------------------------------------------------------------------

FockScanTable fock_scan(std::size_t k_max, const std::vector<double>& r_grid, double eps, double strict_tol,
                        std::size_t threads) {
  if (!std::is_sorted(r_grid.begin(), r_grid.end())) {
    throw Error(ErrorKind::InvalidParameter, "r grid must be sorted ascending");
  }
  const std::size_t nk = k_max + 1;
  FockScanTable table;
  table.rows.resize(r_grid.size() * nk);
  parallel_for(table.rows.size(), threads, [&](std::size_t i) {
    FockScanRow& row = table.rows[i];
    row.r = r_grid[i / nk];
    row.k = i % nk;
    const EntropyValue e = output_entanglement(FockState::number(row.k), row.r, std::nullopt, eps);
    row.entanglement = e.value;
    row.tail_bound = e.tail_bound;
  });

  const auto at = [&](std::size_t ri, std::size_t k) { return table.rows[ri * nk + k].entanglement; };
  table.min_step_r = std::numeric_limits<double>::infinity();
  table.min_step_k = std::numeric_limits<double>::infinity();
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    for (std::size_t k = 0; k < nk; ++k) {
      if (ri + 1 < r_grid.size()) {
        const double step = at(ri + 1, k) - at(ri, k);
        table.min_step_r = std::min(table.min_step_r, step);
        if (!(step > strict_tol)) table.monotone_in_r = false;
      }
      if (r_grid[ri] == 0.0) {
        if (std::abs(at(ri, k)) > strict_tol) table.monotone_in_k = false;
      } else if (k + 1 < nk) {
        const double step = at(ri, k + 1) - at(ri, k);
        table.min_step_k = std::min(table.min_step_k, step);
        if (!(step > strict_tol)) table.monotone_in_k = false;
      }
    }
  }
  if (!std::isfinite(table.min_step_r)) table.min_step_r = 0.0;
  if (!std::isfinite(table.min_step_k)) table.min_step_k = 0.0;
  return table;
}

// ---------------------------------------------------------------------------

ScanReport random_majorization_scan(const ScanConfig& cfg) {
  if (cfg.dim == 0 || cfg.count == 0) throw Error(ErrorKind::InvalidParameter, "dim and count must be >= 1");
  std::vector<double> grid = cfg.r_grid;
  if (cfg.mode == ScanMode::RChain) {
    if (grid.size() < 2) throw Error(ErrorKind::InvalidParameter, "r-chain mode needs at least two grid points");
    if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::InvalidParameter, "r grid must be sorted");
  }
  for (double r : grid) {
    if (r < 0.0) throw Error(ErrorKind::InvalidParameter, "r values must be >= 0");
  }
  if (cfg.r < 0.0) throw Error(ErrorKind::InvalidParameter, "r must be >= 0");

  const std::size_t count = cfg.states.empty() ? cfg.count : cfg.states.size();
  std::optional<ProbabilityVector> vacuum;
  if (cfg.mode == ScanMode::Vacuum) {
    vacuum = schmidt_vector(0, SqueezeParam::from_r(cfg.r).lambda(), std::nullopt, cfg.eps);
  }

  ScanReport rep;
  rep.samples.resize(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    ScanSample& s = rep.samples[i];
    s.index = i;
    FockState phi = cfg.states.empty() ? random_state(cfg.dim, derive_seed(cfg.seed, i)) : cfg.states[i];
    if (cfg.zero_mean_mode == ZeroMeanMode::Penalty) phi = project_zero_mean(phi);
    const StateMoments mom = state_moments(phi);
    s.mean_photon = mom.mean_photon;
    s.mean_lowering_abs = std::abs(mom.mean_lowering);
    if (cfg.zero_mean_mode == ZeroMeanMode::Filter && s.mean_lowering_abs > cfg.mean_tol) {
      s.skipped = true;
      return;
    }
    try {
      if (cfg.mode == ScanMode::Vacuum) {
        const ProbabilityVector out = schmidt_spectrum(output_state(phi, cfg.r, std::nullopt, cfg.eps));
        const MajorizationVerdict v = majorizes(*vacuum, out, cfg.eta);
        s.margin = v.margin;
        s.holds = v.holds;
      } else {
        s.margin = std::numeric_limits<double>::infinity();
        ProbabilityVector prev = schmidt_spectrum(output_state(phi, grid.front(), std::nullopt, cfg.eps));
        for (std::size_t g = 1; g < grid.size(); ++g) {
          ProbabilityVector next = schmidt_spectrum(output_state(phi, grid[g], std::nullopt, cfg.eps));
          const MajorizationVerdict v = majorizes(prev, next, cfg.eta);
          s.margin = std::min(s.margin, v.margin);
          s.holds = s.holds && v.holds;
          prev = std::move(next);
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InconclusiveTruncation && e.kind() != ErrorKind::TruncationError) throw;
      s.inconclusive = true;
    }
  });

  rep.worst_margin = std::numeric_limits<double>::infinity();
  CompensatedSum photon_sum;
  CompensatedSum lowering_sum;
  std::size_t considered = 0;
  for (const ScanSample& s : rep.samples) {
    if (s.skipped) {
      ++rep.skipped;
      continue;
    }
    ++considered;
    photon_sum += s.mean_photon;
    lowering_sum += s.mean_lowering_abs;
    rep.mean_lowering_abs_max = std::max(rep.mean_lowering_abs_max, s.mean_lowering_abs);
    if (s.inconclusive) {
      ++rep.inconclusive;
      continue;
    }
    ++rep.checked;
    if (!s.holds) ++rep.violations;
    if (s.margin < rep.worst_margin) {
      rep.worst_margin = s.margin;
      rep.worst_index = s.index;
    }
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  if (considered > 0) {
    rep.mean_photon_avg = photon_sum.value() / static_cast<double>(considered);
    rep.mean_lowering_abs_avg = lowering_sum.value() / static_cast<double>(considered);
  }
  return rep;
}

// ---------------------------------------------------------------------------

double entanglement_difference(const FockState& a, const FockState& b, double r, double eps) {
  const double lambda = SqueezeParam::from_r(r).lambda();
  const std::size_t b_dim = std::max(required_b_dim(a, lambda, eps), required_b_dim(b, lambda, eps));
  return output_entanglement(a, r, b_dim, eps).value - output_entanglement(b, r, b_dim, eps).value;
}

CrossingResult crossing_finder(const FockState& a, const FockState& b, double r_lo, double r_hi, double tol,
                               std::size_t scan_points, double eps) {
  if (!(r_lo < r_hi) || r_lo < 0.0) throw Error(ErrorKind::InvalidParameter, "need 0 <= r_lo < r_hi");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tol must be > 0");
  scan_points = std::max<std::size_t>(scan_points, 2);

  CrossingResult res;
  auto f = [&](double r) {
    ++res.evaluations;
    const double v = entanglement_difference(a, b, r, eps);
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidState, "non-finite entanglement");
    return v;
  };

  double prev_r = r_lo;
  double prev_f = f(r_lo);
  double last_f = prev_f;
  res.f_lo = prev_f;
  res.bracket_lo = r_lo;
  res.bracket_hi = r_hi;
  for (std::size_t i = 1; i < scan_points; ++i) {
    const double r = i + 1 == scan_points
                         ? r_hi
                         : r_lo + (r_hi - r_lo) * static_cast<double>(i) / static_cast<double>(scan_points - 1);
    const double fr = f(r);
    last_f = fr;
    if (prev_f * fr < 0.0) {
      double lo = prev_r;
      double hi = r;
      double f_lo = prev_f;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      res.r_star = 0.5 * (lo + hi);
      res.bracket_lo = lo;
      res.bracket_hi = hi;
      res.f_lo = f_lo;
      res.f_hi = f(hi);
      return res;
    }
    if (fr != 0.0 || prev_f == 0.0) {
      prev_r = r;
      prev_f = fr;
    }
  }
  res.f_hi = last_f;
  return res;
}

// ---------------------------------------------------------------------------

namespace {

// Precomputed sqrt(p_n^(k)) for the output amplitudes of a fixed squeezer.
class OutputModel {
 public:
  OutputModel(std::size_t dim, double r, std::size_t b_dim) : dim_(dim), b_dim_(b_dim) {
    const double lambda = SqueezeParam::from_r(r).lambda();
    sqrtp_.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      sqrtp_[k].resize(static_cast<Index>(b_dim));
      for (std::size_t n = 0; n < b_dim; ++n) {
        sqrtp_[k](static_cast<Index>(n)) = std::sqrt(schmidt_coefficient(k, lambda, n));
      }
    }
  }

  ObjectiveValue evaluate(const VectorXcd& c, double penalty_weight) const {
    const Index rows = static_cast<Index>(dim_ + b_dim_);
    const Index cols = static_cast<Index>(b_dim_);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    for (std::size_t k = 0; k < dim_; ++k) {
      for (Index n = 0; n < cols; ++n) m(n + static_cast<Index>(k), n) = c(static_cast<Index>(k)) * sqrtp_[k](n);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();

    ObjectiveValue out;
    CompensatedSum ent;
    Eigen::VectorXd weights(s.size());
    for (Index i = 0; i < s.size(); ++i) {
      const double p = s(i) * s(i);
      if (p > 0.0) {
        ent += -p * std::log(p);
        weights(i) = (std::log(p) + 1.0) * s(i);
      } else {
        weights(i) = 0.0;
      }
    }
    out.entropy = ent.value();
    // dE = -2 Re Tr[G^dagger dM] with G = (ln rho_A + 1) M = U diag((ln s^2 + 1) s) V^dagger
    const Eigen::MatrixXcd g = svd.matrixU() * weights.asDiagonal() * svd.matrixV().adjoint();
    out.gradient = VectorXcd::Zero(c.size());
    for (std::size_t k = 0; k < dim_; ++k) {
      cplx acc{};
      for (Index n = 0; n < cols; ++n) acc += g(n + static_cast<Index>(k), n) * sqrtp_[k](n);
      out.gradient(static_cast<Index>(k)) = -2.0 * acc;
    }
    if (penalty_weight != 0.0) {
      const cplx alpha = mean_lowering(c);
      out.penalty = penalty_weight * std::norm(alpha);
      out.gradient += 2.0 * penalty_weight * (lower(c) * std::conj(alpha) + raise(c) * alpha);
    }
    out.value = out.entropy + out.penalty;
    return out;
  }

 private:
  std::size_t dim_;
  std::size_t b_dim_;
  std::vector<Eigen::VectorXd> sqrtp_;
};

std::size_t search_b_dim(std::size_t dim, double r, double eps) {
  return auto_truncation(dim - 1, SqueezeParam::from_r(r).lambda(), eps) + 1;
}

// Removes the components along c and i c (norm and global phase).
VectorXcd horizontal(const VectorXcd& v, const VectorXcd& c) { return v - c.dot(v) * c; }

// L-BFGS on the unit sphere: curvature pairs from projected differences,
// directions projected onto the horizontal space, Armijo backtracking.
RestartRecord descend(const OutputModel& model, VectorXcd c, double penalty_weight, const MinimizeOptions& opt,
                      VectorXcd& final_state) {
  constexpr std::size_t kMemory = 8;
  RestartRecord rec;
  c.normalize();
  ObjectiveValue cur = model.evaluate(c, penalty_weight);
  VectorXcd grad = horizontal(cur.gradient, c);
  std::deque<std::pair<VectorXcd, VectorXcd>> memory;
  for (rec.iterations = 0; rec.iterations < opt.max_iterations; ++rec.iterations) {
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-28) {
      rec.converged = true;
      break;
    }
    VectorXcd q = grad;
    std::vector<double> alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      const auto& [si, yi] = memory[i];
      alpha[i] = real_dot(si, q) / real_dot(yi, si);
      q -= alpha[i] * yi;
    }
    if (memory.empty()) {
      q *= 0.1 / std::max(1.0, std::sqrt(g2));
    } else {
      const auto& [sl, yl] = memory.back();
      q *= real_dot(sl, yl) / yl.squaredNorm();
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const auto& [si, yi] = memory[i];
      const double beta = real_dot(yi, q) / real_dot(yi, si);
      q += (alpha[i] - beta) * si;
    }
    VectorXcd dir = -horizontal(q, c);
    double slope = real_dot(grad, dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -0.1 / std::max(1.0, std::sqrt(g2)) * grad;
      slope = real_dot(grad, dir);
    }

    VectorXcd cand;
    ObjectiveValue next;
    bool accepted = false;
    for (double step = 1.0; step > 1e-16; step *= 0.5) {
      cand = (c + step * dir).normalized();
      next = model.evaluate(cand, penalty_weight);
      if (next.value <= cur.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rec.converged = true;
      break;
    }
    const double improvement = cur.value - next.value;
    const VectorXcd next_grad = horizontal(next.gradient, cand);
    VectorXcd s = horizontal(cand - c, cand);
    VectorXcd y = next_grad - horizontal(grad, cand);
    if (real_dot(s, y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(std::move(s), std::move(y));
      if (memory.size() > kMemory) memory.pop_front();
    }
    for (auto& [si, yi] : memory) {
      si = horizontal(si, cand);
      yi = horizontal(yi, cand);
    }
    c = cand;
    cur = next;
    grad = next_grad;
    if (improvement < opt.improvement_tol) {
      rec.converged = true;
      ++rec.iterations;
      break;
    }
  }
  rec.entropy = cur.entropy;
  rec.objective = cur.value;
  rec.gradient_norm = grad.norm();
  const cplx alpha = mean_lowering(c);
  rec.mean_lowering_abs = std::abs(alpha);
  double photons = 0.0;
  for (Index n = 0; n < c.size(); ++n) photons += static_cast<double>(n) * std::norm(c(n));
  rec.mean_photon = photons;
  final_state = c;
  return rec;
}

}  // namespace

ObjectiveValue entropy_objective(const Eigen::VectorXcd& coeffs, double r, double penalty_weight, std::size_t b_dim) {
  const OutputModel model(static_cast<std::size_t>(coeffs.size()), r, b_dim);
  return model.evaluate(coeffs, penalty_weight);
}

SearchResult minimize_entropy(std::size_t dim, double r, std::size_t restarts, std::uint64_t seed,
                              double penalty_weight, const MinimizeOptions& options) {
  if (dim == 0 || restarts == 0) throw Error(ErrorKind::InvalidParameter, "dim and restarts must be >= 1");
  if (penalty_weight < 0.0) throw Error(ErrorKind::InvalidParameter, "penalty weight must be >= 0");
  const std::size_t b_dim = search_b_dim(dim, r, options.eps);
  const OutputModel model(dim, r, b_dim);

  SearchResult res;
  VectorXcd vac = VectorXcd::Zero(static_cast<Index>(dim));
  vac(0) = 1.0;
  res.vacuum_entropy = model.evaluate(vac, 0.0).entropy;
  std::vector<RestartRecord> history(restarts);
  std::vector<VectorXcd> finals(restarts);
  parallel_for(restarts, options.threads, [&](std::size_t i) {
    if (dim == 1) {
      finals[i] = vac;
      history[i] = {i, res.vacuum_entropy, res.vacuum_entropy, 0.0, 0.0, 0, true, 0.0};
      return;
    }
    history[i] = descend(model, to_vector(random_state(dim, derive_seed(seed, i))), penalty_weight, options, finals[i]);
    history[i].index = i;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < restarts; ++i) {
    if (history[i].objective < history[best].objective) best = i;
  }
  res.best_state = to_state(finals[best]);
  res.best_entropy = history[best].entropy;
  res.vacuum_gap = res.best_entropy - res.vacuum_entropy;
  res.per_restart_history = std::move(history);
  return res;
}

}  // namespace gmoe
