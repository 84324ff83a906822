#include "gmoe/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/numeric.hpp"

namespace gmoe {

FockState FockState::number(std::size_t k, std::size_t dim) {
  std::vector<cplx> amps(std::max(dim, k + 1));
  amps[k] = 1.0;
  return FockState(std::move(amps));
}

std::size_t FockState::max_photon() const noexcept {
  for (std::size_t n = amps_.size(); n-- > 0;) {
    if (amps_[n] != cplx{}) return n;
  }
  return 0;
}

FockState normalize(std::span<const cplx> amplitudes) {
  CompensatedSum norm2;
  for (const cplx& c : amplitudes) norm2 += std::norm(c);
  const double norm = std::sqrt(norm2.value());
  if (amplitudes.empty() || !(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::DegenerateState, "cannot normalize a zero or non-finite amplitude vector");
  }
  std::vector<cplx> amps(amplitudes.begin(), amplitudes.end());
  for (cplx& c : amps) c /= norm;
  return FockState(std::move(amps));
}

StateMoments state_moments(const FockState& state) {
  const auto c = state.amplitudes();
  CompensatedSum photons;
  CompensatedSum lower_re;
  CompensatedSum lower_im;
  for (std::size_t n = 0; n < c.size(); ++n) {
    photons += static_cast<double>(n) * std::norm(c[n]);
    if (n + 1 < c.size()) {
      const cplx t = std::sqrt(static_cast<double>(n + 1)) * std::conj(c[n]) * c[n + 1];
      lower_re += t.real();
      lower_im += t.imag();
    }
  }
  return {photons.value(), cplx(lower_re.value(), lower_im.value())};
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    double& p = probs_[i];
    if (!std::isfinite(p) || p < -1e-10) {
      std::ostringstream os;
      os << "entry " << i << " = " << p << " is negative or non-finite";
      throw Error(ErrorKind::InvalidDistribution, os.str());
    }
    p = std::max(p, 0.0);
  }
  if (!std::isfinite(tail_mass_) || tail_mass_ < 0.0) {
    throw Error(ErrorKind::InvalidDistribution, "tail mass must be nonnegative");
  }
}

double ProbabilityVector::total() const noexcept { return compensated_sum(probs_); }

double ProbabilityVector::normalization_residual() const noexcept {
  return std::abs(total() + tail_mass_ - 1.0);
}

ProbabilityVector ProbabilityVector::sorted_descending() const {
  std::vector<double> sorted = probs_;
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  return ProbabilityVector(std::move(sorted), tail_mass_);
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorKind::InvalidState, "density matrix must be square and non-empty");
  }
}

DensityMatrix DensityMatrix::pure(const FockState& state) {
  const auto c = state.amplitudes();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t n = 0; n < c.size(); ++n) v(static_cast<Eigen::Index>(n)) = c[n];
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::hermiticity_residual() const noexcept {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double trace_tol) const {
  std::ostringstream os;
  if (hermiticity_residual() > 1e-12) {
    os << "not Hermitian (residual " << hermiticity_residual() << ")";
  } else if (std::abs(trace() - 1.0) > trace_tol) {
    os << "trace " << trace() << " differs from 1";
  } else if (min_eigenvalue() < -1e-10) {
    os << "negative eigenvalue " << min_eigenvalue();
  } else {
    return;
  }
  throw Error(ErrorKind::InvalidState, os.str());
}

ProbabilityVector schmidt_spectrum(const BipartiteAmplitudeMatrix& m) {
  const double norm2 = m.entries.squaredNorm();
  if (std::abs(norm2 + m.tail_mass - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "amplitude matrix has squared norm " << norm2 << " (tail " << m.tail_mass << ")";
    throw Error(ErrorKind::InvalidState, os.str());
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m.entries);
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<double> probs(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) probs[static_cast<std::size_t>(i)] = s(i) * s(i);
  return ProbabilityVector(std::move(probs), m.tail_mass).sorted_descending();
}

ProbabilityVector spectrum(const DensityMatrix& rho) {
  const Eigen::MatrixXcd h = 0.5 * (rho.entries() + rho.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<double> probs(ev.data(), ev.data() + ev.size());
  for (double& p : probs) p = std::max(p, 0.0);
  const double tail = std::max(0.0, 1.0 - rho.trace());
  return ProbabilityVector(std::move(probs), tail).sorted_descending();
}

EntropyValue entropy(const ProbabilityVector& p, EntropyUnit unit) {
  CompensatedSum acc;
  for (double x : p.probs()) {
    if (x > 0.0) acc += -x * std::log(x);
  }
  const double t = p.tail_mass();
  double bound = 0.0;
  if (t > 0.0) bound = -t * std::log(t) + t * std::log(kTailSupport);
  const double scale = unit == EntropyUnit::Bits ? 1.0 / std::log(2.0) : 1.0;
  return {acc.value() * scale, bound * scale};
}

}  // namespace gmoe
