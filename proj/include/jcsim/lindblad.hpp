#pragma once

// Hamiltonian, dissipators and the full generator
//
//   A(t) rho = -i [H(t), rho] + gamma * sum_j ( [V_j rho, V_j^dag] + [V_j, rho V_j^dag] )
//
// on the truncated space, plus the quadratic forms tr(rho A rho) used to
// study contraction of the Hilbert-Schmidt norm.

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "jcsim/density.hpp"
#include "jcsim/genspec.hpp"

namespace jcsim {

struct ModelSpec {
  double omega_c = 1.0;   // cavity frequency
  double omega_a = 1.0;   // atomic frequency
  double coupling = 0.0;  // dipole coupling p
  double gamma = 0.0;     // damping rate
  PolynomialOperatorSpec pump;
  std::vector<PolynomialOperatorSpec> dissipators;
  TruncationLevel nu{8};

  ModelSpec at_level(TruncationLevel level) const {
    ModelSpec m = *this;
    m.nu = level;
    return m;
  }

  bool time_independent() const {
    if (!pump.time_independent()) return false;
    return std::all_of(dissipators.begin(), dissipators.end(), [](const auto& v) { return v.time_independent(); });
  }

  /// Smallest nonzero coefficient frequency, or 0 for an autonomous model.
  double min_frequency() const {
    double w = 0.0;
    auto scan = [&w](const PolynomialOperatorSpec& s) {
      for (double f : s.frequencies()) w = (w == 0.0) ? f : std::min(w, f);
    };
    scan(pump);
    for (const auto& v : dissipators) scan(v);
    return w;
  }

  /// Checks parameter ranges and samples the pump for Hermiticity on [0, t_max].
  void validate(double t_max) const {
    if (!(omega_c > 0.0)) throw PreconditionError("omega_c must be > 0");
    if (!(omega_a > 0.0)) throw PreconditionError("omega_a must be > 0");
    if (!(gamma >= 0.0)) throw PreconditionError("gamma must be >= 0");
    if (!std::isfinite(coupling)) throw PreconditionError("coupling must be finite");
    const auto times = uniform_sample_times(t_max > 0.0 ? t_max : 1.0);
    const auto report = validate_pump_hermitian(pump, nu, times);
    if (!report.ok) throw PreconditionError(report.describe());
  }
};

/// H(t) = omega_c a^dag a + omega_a sigma_3 / 2 + p ((a + a^dag) sigma_1 + A(t)).
inline OperatorMatrix hamiltonian(const ModelSpec& model, double t) {
  const TruncationLevel nu = model.nu;
  const OperatorMatrix a = annihilation(nu);
  OperatorMatrix h = model.omega_c * number(nu) + 0.5 * model.omega_a * pauli(Pauli::z, nu);
  if (model.coupling != 0.0) {
    const OperatorMatrix field = a + a.adjoint();
    h += model.coupling * (field * pauli(Pauli::x, nu) + eval(model.pump, nu, t));
  }
  return h;
}

/// [V rho, V^dag] + [V, rho V^dag] = 2 V rho V^dag - V^dag V rho - rho V^dag V.
inline OperatorMatrix dissipator_apply(const OperatorMatrix& v, const OperatorMatrix& rho) {
  require_same_dim(v, rho, "dissipator_apply");
  const OperatorMatrix vdag = v.adjoint();
  const OperatorMatrix vdagv = vdag * v;
  return 2.0 * (v * rho * vdag) - vdagv * rho - rho * vdagv;
}

/// Reference evaluation of A(t) rho straight from the definition.
inline OperatorMatrix generator_apply(const ModelSpec& model, double t, const OperatorMatrix& rho) {
  const OperatorMatrix h = hamiltonian(model, t);
  require_same_dim(h, rho, "generator_apply");
  OperatorMatrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
  if (model.gamma != 0.0) {
    for (const auto& vspec : model.dissipators) out += model.gamma * dissipator_apply(eval(vspec, model.nu, t), rho);
  }
  return out;
}

inline OperatorMatrix generator_apply(const ModelSpec& model, double t, const DensityMatrix& rho) {
  return generator_apply(model, t, rho.matrix());
}

/// Re tr(rho (-i [H(t), rho])); identically zero for Hermitian rho.
inline double quadratic_form_k(const ModelSpec& model, double t, const DensityMatrix& rho) {
  const OperatorMatrix h = hamiltonian(model, t);
  require_same_dim(h, rho.matrix(), "quadratic_form_k");
  const OperatorMatrix& r = rho.matrix();
  const OperatorMatrix k = Complex(0.0, -1.0) * (h * r - r * h);
  return (r * k).trace().real();
}

/// Re tr(rho D_V rho) by direct matrix products.
inline double quadratic_form_d(const OperatorMatrix& v, const DensityMatrix& rho) {
  return (rho.matrix() * dissipator_apply(v, rho.matrix())).trace().real();
}

namespace detail {

struct Eigenframe {
  Eigen::VectorXd values;
  OperatorMatrix v_in_frame;  // Q^dag V Q
};

inline Eigenframe eigenframe(const OperatorMatrix& v, const DensityMatrix& rho) {
  require_same_dim(v, rho.matrix(), "eigenbasis_form");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw Error("eigenbasis_form: eigendecomposition failed");
  const OperatorMatrix& q = es.eigenvectors();
  return {es.eigenvalues(), q.adjoint() * v * q};
}

}  // namespace detail

/// tr(rho D_V rho) evaluated in the eigenbasis of rho:
///   2 sum_{i,k} |V_ik|^2 rho_k (rho_i - rho_k).
/// Exact for every V; agrees with quadratic_form_d up to roundoff.
inline double eigenbasis_form(const OperatorMatrix& v, const DensityMatrix& rho) {
  const auto f = detail::eigenframe(v, rho);
  const Eigen::Index d = f.values.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      sum += std::norm(f.v_in_frame(i, k)) * f.values(k) * (f.values(i) - f.values(k));
    }
  }
  return 2.0 * sum;
}

/// -sum_{i,k} |V_ik|^2 (rho_i - rho_k)^2 in the eigenbasis of rho.
///
/// Equals eigenbasis_form only when |V_ik| = |V_ki| in that basis (e.g. for
/// Hermitian V); for V = a it is not an identity.
inline double symmetrized_form(const OperatorMatrix& v, const DensityMatrix& rho) {
  const auto f = detail::eigenframe(v, rho);
  const Eigen::Index d = f.values.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const double gap = f.values(i) - f.values(k);
      sum += std::norm(f.v_in_frame(i, k)) * gap * gap;
    }
  }
  return -sum;
}

/// Cached evaluation of A(t) rho for repeated application.
///
/// Time-independent pieces are assembled once; all operators are stored
/// sparse since every polynomial term is a single photon-shift band.
class Generator {
 public:
  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  explicit Generator(const ModelSpec& model) : nu_(model.nu), gamma_(model.gamma) {
    const TruncationLevel nu = model.nu;
    OperatorMatrix h = hamiltonian(model, 0.0);
    OperatorMatrix k_static = OperatorMatrix::Zero(nu.dim(), nu.dim());

    if (model.coupling != 0.0 && !model.pump.time_independent()) {
      // Remove the pump at t = 0 and keep it as timed parts.
      h -= model.coupling * eval(model.pump, nu, 0.0);
      for (const auto& term : model.pump.terms()) {
        for (const auto& c : term.coeff.components()) {
          pump_parts_.push_back(
              {sparse(model.coupling * monomial(nu, term.creation_power, term.annihilation_power, c.coeff)), c.omega});
        }
      }
    }

    if (gamma_ != 0.0) {
      for (const auto& vspec : model.dissipators) {
        if (vspec.time_independent()) {
          const OperatorMatrix v = eval(vspec, nu, 0.0);
          k_static += v.adjoint() * v;
          constant_v_.push_back({sparse(v), sparse(v.adjoint())});
        } else {
          std::vector<Part> parts;
          for (const auto& term : vspec.terms()) {
            for (const auto& c : term.coeff.components()) {
              parts.push_back({sparse(monomial(nu, term.creation_power, term.annihilation_power, c.coeff)), c.omega});
            }
          }
          timed_v_.push_back(std::move(parts));
        }
      }
    }

    const Complex i(0.0, 1.0);
    left_static_ = sparse(-i * h - gamma_ * k_static);
    right_static_ = sparse(i * h - gamma_ * k_static);
  }

  TruncationLevel level() const noexcept { return nu_; }

  OperatorMatrix apply(double t, const OperatorMatrix& rho) const {
    const Complex i(0.0, 1.0);
    OperatorMatrix out;
    if (pump_parts_.empty() && timed_v_.empty()) {
      out.noalias() = left_static_ * rho;
      out.noalias() += rho * right_static_;
    } else {
      Sparse left = left_static_;
      Sparse right = right_static_;
      for (const auto& p : pump_parts_) {
        const Complex phase = std::exp(Complex(0.0, p.omega * t));
        left += Sparse((-i * phase) * p.m);
        right += Sparse((i * phase) * p.m);
      }
      for (const auto& parts : timed_v_) {
        const Sparse v = combine(parts, t);
        const Sparse vdag = v.adjoint();
        const Sparse k = vdag * v;
        left -= gamma_ * k;
        right -= gamma_ * k;
        out_add_jump(out, v, vdag, rho);
      }
      if (out.size() == 0) out = OperatorMatrix::Zero(rho.rows(), rho.cols());
      out.noalias() += left * rho;
      out.noalias() += rho * right;
    }
    for (const auto& v : constant_v_) out_add_jump(out, v.v, v.vdag, rho);
    return out;
  }

 private:
  struct Part {
    Sparse m;
    double omega;
  };
  struct ConstantJump {
    Sparse v, vdag;
  };

  static Sparse sparse(const OperatorMatrix& m) { return m.sparseView(Complex(0.0), 0.0); }

  static Sparse combine(const std::vector<Part>& parts, double t) {
    Sparse v(parts.front().m.rows(), parts.front().m.cols());
    for (const auto& p : parts) v += Sparse(std::exp(Complex(0.0, p.omega * t)) * p.m);
    return v;
  }

  // out += 2 gamma V rho V^dag
  void out_add_jump(OperatorMatrix& out, const Sparse& v, const Sparse& vdag, const OperatorMatrix& rho) const {
    OperatorMatrix vr = v * rho;
    if (out.size() == 0) out = OperatorMatrix::Zero(rho.rows(), rho.cols());
    out.noalias() += (2.0 * gamma_) * (vr * vdag);
  }

  TruncationLevel nu_;
  double gamma_;
  Sparse left_static_, right_static_;
  std::vector<Part> pump_parts_;
  std::vector<ConstantJump> constant_v_;
  std::vector<std::vector<Part>> timed_v_;
};

struct BandwidthReport {
  int empirical = 0;  // measured coupling width
  int formula = 0;    // max(2, deg pump, deg V)
};

/// Measures the smallest N such that A(t) maps |k,r><k',r'| only into entries
/// with |k-n| + |k'-n'| <= N, scanning every basis projector at several times
/// across one period of the coefficient frequencies.
inline BandwidthReport bandwidth(const ModelSpec& model) {
  BandwidthReport report;
  int deg_v = 0;
  for (const auto& v : model.dissipators) deg_v = std::max(deg_v, v.degree());
  report.formula = std::max({2, model.pump.degree(), deg_v});

  std::vector<double> times{0.0};
  if (const double w = model.min_frequency(); w > 0.0) {
    const double period = 2.0 * std::numbers::pi / w;
    for (int k = 1; k < 8; ++k) times.push_back(period * k / 8.0);
  }

  const Generator gen(model);
  const Eigen::Index d = model.nu.dim();
  OperatorMatrix proj = OperatorMatrix::Zero(d, d);
  for (double t : times) {
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index cp = 0; cp < d; ++cp) {
        proj(c, cp) = 1.0;
        const OperatorMatrix out = gen.apply(t, proj);
        proj(c, cp) = 0.0;
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index rp = 0; rp < d; ++rp) {
            if (std::abs(out(r, rp)) <= 1e-13) continue;
            const int width = std::abs(photon_of(c) - photon_of(r)) + std::abs(photon_of(cp) - photon_of(rp));
            report.empirical = std::max(report.empirical, width);
          }
        }
      }
    }
  }
  return report;
}

}  // namespace jcsim
