#pragma once

// Truncated single-mode Fock space tensored with a two-level atom.
//
// Basis vectors |n,s> with 0 <= n <= nu and s in {+,-} (the sigma_3
// eigenvalue) are stored with the atom index running fastest:
//
//     flat(n, s) = 2n + (s == + ? 0 : 1)
//
// so every 2x2 atomic coefficient block is contiguous in the matrix.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "jcsim/error.hpp"

namespace jcsim {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;

/// Photon-number cutoff; the truncated space has dimension 2(nu+1).
class TruncationLevel {
 public:
  explicit TruncationLevel(int nu) : nu_(nu) {
    if (nu < 1) {
      throw PreconditionError("truncation level must be >= 1, got " + std::to_string(nu));
    }
  }

  int value() const noexcept { return nu_; }
  Eigen::Index dim() const noexcept { return 2 * (static_cast<Eigen::Index>(nu_) + 1); }

  friend bool operator==(TruncationLevel, TruncationLevel) = default;
  friend auto operator<=>(TruncationLevel, TruncationLevel) = default;

 private:
  int nu_;
};

enum class Spin { up, down };

inline char to_char(Spin s) { return s == Spin::up ? '+' : '-'; }

inline Spin spin_from_char(char c) {
  if (c == '+') return Spin::up;
  if (c == '-') return Spin::down;
  throw PreconditionError(std::string("atomic level must be '+' or '-', got '") + c + "'");
}

struct BasisIndex {
  int n;
  Spin s;

  Eigen::Index flat() const noexcept { return 2 * static_cast<Eigen::Index>(n) + (s == Spin::up ? 0 : 1); }

  static BasisIndex from_flat(Eigen::Index i) {
    return {static_cast<int>(i / 2), i % 2 == 0 ? Spin::up : Spin::down};
  }

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

/// Photon number of a flat index.
inline int photon_of(Eigen::Index flat) noexcept { return static_cast<int>(flat / 2); }

namespace pauli_matrix {

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 sigma1() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix2 sigma3() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

/// Raising operator, maps s_- to s_+.
inline Matrix2 sigma_plus() {
  Matrix2 m;
  m << 0, 1, 0, 0;
  return m;
}

inline Matrix2 sigma_minus() {
  Matrix2 m;
  m << 0, 0, 1, 0;
  return m;
}

}  // namespace pauli_matrix

/// I_{nu+1} (x) block, with `block` acting on the atomic factor.
inline OperatorMatrix atomic_operator(TruncationLevel nu, const Matrix2& block) {
  const Eigen::Index d = nu.dim();
  OperatorMatrix m = OperatorMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; k += 2) m.block<2, 2>(k, k) = block;
  return m;
}

inline OperatorMatrix identity(TruncationLevel nu) {
  return OperatorMatrix::Identity(nu.dim(), nu.dim());
}

/// a_nu: <n-1,s| a |n,s> = sqrt(n) for 1 <= n <= nu.
inline OperatorMatrix annihilation(TruncationLevel nu) {
  const Eigen::Index d = nu.dim();
  OperatorMatrix a = OperatorMatrix::Zero(d, d);
  for (int n = 1; n <= nu.value(); ++n) {
    const double amp = std::sqrt(static_cast<double>(n));
    for (Spin s : {Spin::up, Spin::down}) a(BasisIndex{n - 1, s}.flat(), BasisIndex{n, s}.flat()) = amp;
  }
  return a;
}

/// a_nu^dagger, the adjoint of annihilation(nu); it maps |nu,s> to zero.
inline OperatorMatrix creation(TruncationLevel nu) { return annihilation(nu).adjoint(); }

inline OperatorMatrix number(TruncationLevel nu) {
  const Eigen::Index d = nu.dim();
  OperatorMatrix m = OperatorMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = static_cast<double>(photon_of(i));
  return m;
}

enum class Pauli { x, z, plus, minus };

inline OperatorMatrix pauli(Pauli which, TruncationLevel nu) {
  switch (which) {
    case Pauli::x: return atomic_operator(nu, pauli_matrix::sigma1());
    case Pauli::z: return atomic_operator(nu, pauli_matrix::sigma3());
    case Pauli::plus: return atomic_operator(nu, pauli_matrix::sigma_plus());
    case Pauli::minus: return atomic_operator(nu, pauli_matrix::sigma_minus());
  }
  throw PreconditionError("unknown Pauli matrix");
}

/// (a_nu^dagger)^l (a_nu)^lp (x) coeff, built from the truncated factors.
///
/// The product is formed on the photon factor first and then tensored with
/// the coefficient, so entries vanish unless photon(row) - photon(col) = l - lp.
inline OperatorMatrix monomial(TruncationLevel nu, int l, int lp, const Matrix2& coeff) {
  if (l < 0 || lp < 0) throw PreconditionError("monomial powers must be >= 0");
  const int levels = nu.value() + 1;
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd raise = lower.transpose();

  Eigen::MatrixXd photon = Eigen::MatrixXd::Identity(levels, levels);
  for (int k = 0; k < lp; ++k) photon = lower * photon;
  for (int k = 0; k < l; ++k) photon = raise * photon;

  const Eigen::Index d = nu.dim();
  OperatorMatrix m = OperatorMatrix::Zero(d, d);
  for (int r = 0; r < levels; ++r) {
    for (int c = 0; c < levels; ++c) {
      if (photon(r, c) != 0.0) m.block<2, 2>(2 * r, 2 * c) = photon(r, c) * coeff;
    }
  }
  return m;
}

/// Hilbert-Schmidt norm of a (not necessarily Hermitian) matrix.
inline double hs_norm(const OperatorMatrix& m) { return m.norm(); }

/// ||m - m^dagger||_HS.
inline double hermiticity_defect(const OperatorMatrix& m) { return (m - m.adjoint()).norm(); }

inline void require_same_dim(const OperatorMatrix& x, const OperatorMatrix& y, const char* what) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) + "x" +
                            std::to_string(y.cols()) + ")");
  }
}

}  // namespace jcsim
