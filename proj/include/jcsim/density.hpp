#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "jcsim/fock.hpp"

namespace jcsim {

/// Hermitian operator on the truncated space, with Hilbert-Schmidt geometry.
///
/// Positivity and unit trace are not part of the type; they are queried
/// (`min_eigenvalue`, `trace`) because they are verification targets.
class DensityMatrix {
 public:
  DensityMatrix(TruncationLevel nu, OperatorMatrix entries) : nu_(nu), m_(std::move(entries)) {
    if (m_.rows() != nu.dim() || m_.cols() != nu.dim()) {
      throw DimensionMismatch("density matrix must be " + std::to_string(nu.dim()) + "x" + std::to_string(nu.dim()) +
                              " at nu=" + std::to_string(nu.value()));
    }
    if (!m_.allFinite()) throw PreconditionError("density matrix has non-finite entries");
    const double defect = hermiticity_defect(m_);
    if (defect > hermitian_tolerance()) {
      throw PreconditionError("density matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    }
  }

  static DensityMatrix zero(TruncationLevel nu) { return {nu, OperatorMatrix::Zero(nu.dim(), nu.dim())}; }

  TruncationLevel level() const noexcept { return nu_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  const OperatorMatrix& matrix() const noexcept { return m_; }

  Complex operator()(BasisIndex row, BasisIndex col) const { return m_(row.flat(), col.flat()); }

  Complex trace() const { return m_.trace(); }

  /// ||rho||_HS from the entry sum  sum |rho_{n,s;n',s'}|^2.
  double hs_norm() const { return m_.norm(); }

  double purity() const { return m_.squaredNorm(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolve failed");
    return es.eigenvalues().minCoeff();
  }

  bool is_psd(double tol = 1e-12) const { return min_eigenvalue() >= -tol; }

 private:
  double hermitian_tolerance() const { return 1e-12 * static_cast<double>(dim()) * std::max(1.0, m_.norm()); }

  TruncationLevel nu_;
  OperatorMatrix m_;
};

/// <rho1, rho2>_HS = tr(rho1 rho2).
inline double hs_inner(const DensityMatrix& x, const DensityMatrix& y) {
  require_same_dim(x.matrix(), y.matrix(), "hs_inner");
  const Complex value = x.matrix().cwiseProduct(y.matrix().transpose()).sum();
  const double scale = std::max(1.0, x.hs_norm() * y.hs_norm());
  if (std::abs(value.imag()) > 1e-12 * scale) {
    throw PreconditionError("hs_inner: imaginary residue " + std::to_string(value.imag()) + " (inputs not Hermitian?)");
  }
  return value.real();
}

/// ||rho||_HS from the trace form sqrt(tr(rho^2)); agrees with hs_norm().
inline double hs_norm_trace_form(const DensityMatrix& rho) { return std::sqrt(hs_inner(rho, rho)); }

/// Keeps the entries with n, n' <= nu_small.
inline DensityMatrix truncate(const DensityMatrix& full, TruncationLevel nu_small) {
  if (nu_small > full.level()) {
    throw PreconditionError("truncate: target level " + std::to_string(nu_small.value()) + " exceeds source level " +
                            std::to_string(full.level().value()));
  }
  const Eigen::Index d = nu_small.dim();
  return {nu_small, full.matrix().topLeftCorner(d, d)};
}

/// Zero-pads to a larger level; truncate(embed(rho, nu), rho.level()) == rho.
inline DensityMatrix embed(const DensityMatrix& small, TruncationLevel nu_big) {
  if (nu_big < small.level()) {
    throw PreconditionError("embed: target level " + std::to_string(nu_big.value()) + " below source level " +
                            std::to_string(small.level().value()));
  }
  OperatorMatrix m = OperatorMatrix::Zero(nu_big.dim(), nu_big.dim());
  m.topLeftCorner(small.dim(), small.dim()) = small.matrix();
  return {nu_big, std::move(m)};
}

namespace detail {

// photon distribution (x) |s><s|
inline DensityMatrix atom_product(TruncationLevel nu, const Eigen::MatrixXcd& photon, Spin s) {
  OperatorMatrix m = OperatorMatrix::Zero(nu.dim(), nu.dim());
  const Eigen::Index off = s == Spin::up ? 0 : 1;
  for (Eigen::Index r = 0; r < photon.rows(); ++r) {
    for (Eigen::Index c = 0; c < photon.cols(); ++c) m(2 * r + off, 2 * c + off) = photon(r, c);
  }
  return {nu, std::move(m)};
}

inline Eigen::VectorXcd coherent_amplitudes(Complex alpha, TruncationLevel nu) {
  Eigen::VectorXcd psi(nu.value() + 1);
  psi(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= nu.value(); ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return psi;
}

}  // namespace detail

inline DensityMatrix state_fock(int n, Spin s, TruncationLevel nu) {
  if (n < 0 || n > nu.value()) {
    throw PreconditionError("state_fock: photon number " + std::to_string(n) + " outside [0, " +
                            std::to_string(nu.value()) + "]");
  }
  OperatorMatrix m = OperatorMatrix::Zero(nu.dim(), nu.dim());
  const Eigen::Index i = BasisIndex{n, s}.flat();
  m(i, i) = 1.0;
  return {nu, std::move(m)};
}

/// Probability mass of the coherent state beyond the cutoff, before renormalization.
inline double coherent_tail_weight(Complex alpha, TruncationLevel nu) {
  return std::max(0.0, 1.0 - detail::coherent_amplitudes(alpha, nu).squaredNorm());
}

/// |alpha><alpha| (x) |s><s|, renormalized to unit trace after truncation.
inline DensityMatrix state_coherent(Complex alpha, Spin s, TruncationLevel nu) {
  Eigen::VectorXcd psi = detail::coherent_amplitudes(alpha, nu);
  psi /= psi.norm();
  return detail::atom_product(nu, psi * psi.adjoint(), s);
}

/// Geometric photon distribution with the given mean, renormalized after truncation.
inline DensityMatrix state_thermal(double mean_n, Spin s, TruncationLevel nu) {
  if (!(mean_n >= 0.0) || !std::isfinite(mean_n)) throw PreconditionError("state_thermal: mean_n must be >= 0");
  const double q = mean_n / (1.0 + mean_n);
  Eigen::VectorXd p(nu.value() + 1);
  double w = 1.0;
  for (int n = 0; n <= nu.value(); ++n, w *= q) p(n) = w;
  p /= p.sum();
  return detail::atom_product(nu, p.cast<Complex>().asDiagonal().toDenseMatrix(), s);
}

struct ObservableSet {
  Complex trace;
  double hs_norm = 0.0;
  double purity = 0.0;
  double min_eigenvalue = 0.0;
  double inversion = 0.0;      // tr(rho sigma_3)
  double photon_number = 0.0;  // tr(rho a^dag a)
};

inline ObservableSet observables(const DensityMatrix& rho) {
  ObservableSet o;
  const OperatorMatrix& m = rho.matrix();
  o.trace = m.trace();
  o.hs_norm = rho.hs_norm();
  o.purity = rho.purity();
  o.min_eigenvalue = rho.min_eigenvalue();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double p = m(i, i).real();
    o.inversion += (i % 2 == 0) ? p : -p;
    o.photon_number += photon_of(i) * p;
  }
  return o;
}

}  // namespace jcsim
