#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmoe/fock.hpp"
#include "gmoe/majorization.hpp"
#include "gmoe/squeezer.hpp"

namespace gmoe {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items
/// must write only to their own slot; results are then independent of the
/// schedule.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

/// 64-bit seed for work item `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Independent standard complex Gaussian amplitudes, normalized (uniform on
/// the unit sphere of C^dim).
FockState random_state(std::size_t dim, std::uint64_t seed);

/// Moves `state` onto the zero-mean manifold <a> = 0 with Gauss-Newton steps
/// that stay on the unit sphere. Throws PreconditionViolated if |<a>| cannot
/// be brought below tol.
FockState project_zero_mean(const FockState& state, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Fock-input entanglement table

struct FockScanRow {
  double r = 0.0;
  std::size_t k = 0;
  double entanglement = 0.0;
  double tail_bound = 0.0;
};

struct FockScanTable {
  std::vector<FockScanRow> rows;  // r-major, k-minor
  bool monotone_in_r = true;
  bool monotone_in_k = true;
  /// Smallest increment seen along each axis (r > 0 rows only for k).
  double min_step_r = 0.0;
  double min_step_k = 0.0;
};

/// E[Psi^(k)] for k = 0..k_max on a sorted r grid. Monotonicity is strict:
/// each step must exceed `strict_tol`; the r = 0 row must vanish.
FockScanTable fock_scan(std::size_t k_max, const std::vector<double>& r_grid, double eps = kDefaultEps,
                        double strict_tol = 1e-10, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Randomized majorization scans

enum class ZeroMeanMode { Off, Filter, Penalty };
enum class ScanMode { Vacuum, RChain };

struct ScanConfig {
  std::size_t dim = 21;
  std::size_t count = 1000;
  double r = 1.0;
  /// r-chain mode compares consecutive grid points.
  std::vector<double> r_grid;
  std::uint64_t seed = 0;
  double eta = kDefaultEta;
  double eps = kDefaultEps;
  ZeroMeanMode zero_mean_mode = ZeroMeanMode::Off;
  /// Filter mode keeps samples with |<a>| <= mean_tol.
  double mean_tol = 0.05;
  ScanMode mode = ScanMode::Vacuum;
  std::size_t threads = 1;
  /// When non-empty these states are used instead of random samples.
  std::vector<FockState> states;
};

struct ScanSample {
  std::size_t index = 0;
  double mean_photon = 0.0;
  double mean_lowering_abs = 0.0;
  double margin = 0.0;
  bool holds = true;
  bool skipped = false;
  bool inconclusive = false;

  bool operator==(const ScanSample&) const = default;
};

struct ScanReport {
  std::size_t violations = 0;
  std::size_t inconclusive = 0;
  std::size_t skipped = 0;
  std::size_t checked = 0;
  double worst_margin = 0.0;
  std::optional<std::size_t> worst_index;
  double mean_photon_avg = 0.0;
  double mean_lowering_abs_avg = 0.0;
  double mean_lowering_abs_max = 0.0;
  std::vector<ScanSample> samples;

  bool operator==(const ScanReport&) const = default;
};

ScanReport random_majorization_scan(const ScanConfig& cfg);

// ---------------------------------------------------------------------------
// Entanglement crossings

struct CrossingResult {
  std::optional<double> r_star;
  /// E_a - E_b at the bracket ends (or the scan ends when none was found).
  double f_lo = 0.0;
  double f_hi = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t evaluations = 0;
};

/// E_a(r) - E_b(r) with both outputs truncated at the same Bob dimension.
double entanglement_difference(const FockState& a, const FockState& b, double r, double eps = kDefaultEps);

/// Finds the first strict sign change of E_a - E_b on a uniform pre-scan of
/// [r_lo, r_hi] and bisects it down to `tol`.
CrossingResult crossing_finder(const FockState& a, const FockState& b, double r_lo, double r_hi, double tol,
                               std::size_t scan_points = 32, double eps = kDefaultEps);

// ---------------------------------------------------------------------------
// Multi-start minimum output entropy search

struct ObjectiveValue {
  double entropy = 0.0;
  double penalty = 0.0;  // weight * |<a>|^2
  double value = 0.0;    // entropy + penalty
  /// d/dRe c_k + i d/dIm c_k of `value` (Euclidean, not projected).
  Eigen::VectorXcd gradient;
};

/// Output entanglement plus the zero-mean penalty, with its gradient, for a
/// unit-norm coefficient vector. b_dim fixes the Bob truncation.
ObjectiveValue entropy_objective(const Eigen::VectorXcd& coeffs, double r, double penalty_weight, std::size_t b_dim);

struct RestartRecord {
  std::size_t index = 0;
  double entropy = 0.0;
  double objective = 0.0;
  double mean_photon = 0.0;
  double mean_lowering_abs = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

struct SearchResult {
  FockState best_state = FockState::number(0);
  double best_entropy = 0.0;
  double vacuum_entropy = 0.0;
  double vacuum_gap = 0.0;  // best_entropy - vacuum_entropy
  std::vector<RestartRecord> per_restart_history;
};

struct MinimizeOptions {
  std::size_t max_iterations = 2000;
  double improvement_tol = 1e-12;
  double eps = kDefaultEps;
  std::size_t threads = 1;
};

SearchResult minimize_entropy(std::size_t dim, double r, std::size_t restarts, std::uint64_t seed,
                              double penalty_weight, const MinimizeOptions& options = {});

}  // namespace gmoe
