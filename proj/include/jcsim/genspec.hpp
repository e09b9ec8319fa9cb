#pragma once

// Time-dependent operator polynomials  sum_terms C_{l,lp}(t) a^{dag l} a^{lp}
// with 2x2 atomic coefficients that are finite trigonometric polynomials
// C(t) = sum_k C_k exp(i omega_k t).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jcsim/fock.hpp"

namespace jcsim {

struct TrigComponent {
  Matrix2 coeff = Matrix2::Zero();
  double omega = 0.0;
};

class TrigCoefficient {
 public:
  TrigCoefficient() = default;
  explicit TrigCoefficient(std::vector<TrigComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw PreconditionError("trigonometric coefficient needs at least one component");
    for (const auto& c : components_) {
      if (!std::isfinite(c.omega)) throw PreconditionError("trigonometric coefficient frequency must be finite");
      if (!c.coeff.allFinite()) throw PreconditionError("trigonometric coefficient matrix must be finite");
    }
  }

  /// Single constant component.
  static TrigCoefficient constant(const Matrix2& c) { return TrigCoefficient({{c, 0.0}}); }

  Matrix2 at(double t) const {
    Matrix2 m = Matrix2::Zero();
    for (const auto& c : components_) m += std::exp(Complex(0.0, c.omega * t)) * c.coeff;
    return m;
  }

  bool time_independent() const {
    return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c.omega == 0.0; });
  }

  const std::vector<TrigComponent>& components() const noexcept { return components_; }

 private:
  std::vector<TrigComponent> components_;
};

struct PolynomialTerm {
  int creation_power = 0;      // l
  int annihilation_power = 0;  // l'
  TrigCoefficient coeff;
};

class PolynomialOperatorSpec {
 public:
  PolynomialOperatorSpec() = default;
  explicit PolynomialOperatorSpec(std::vector<PolynomialTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.creation_power < 0 || t.annihilation_power < 0) {
        throw PreconditionError("polynomial term powers must be >= 0");
      }
    }
  }

  const std::vector<PolynomialTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// max(l + l') over terms; 0 for the empty polynomial.
  int degree() const {
    int deg = 0;
    for (const auto& t : terms_) deg = std::max(deg, t.creation_power + t.annihilation_power);
    return deg;
  }

  bool time_independent() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.coeff.time_independent(); });
  }

  /// All distinct nonzero |omega| appearing in the coefficients.
  std::vector<double> frequencies() const {
    std::vector<double> out;
    for (const auto& t : terms_) {
      for (const auto& c : t.coeff.components()) {
        if (c.omega != 0.0) out.push_back(std::abs(c.omega));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Disjoint union of the term lists (the sum of the two operators).
  friend PolynomialOperatorSpec operator+(const PolynomialOperatorSpec& x, const PolynomialOperatorSpec& y) {
    std::vector<PolynomialTerm> terms = x.terms_;
    terms.insert(terms.end(), y.terms_.begin(), y.terms_.end());
    return PolynomialOperatorSpec(std::move(terms));
  }

 private:
  std::vector<PolynomialTerm> terms_;
};

/// Evaluates the polynomial at time t with a, a^dag replaced by a_nu, a_nu^dag.
inline OperatorMatrix eval(const PolynomialOperatorSpec& spec, TruncationLevel nu, double t) {
  OperatorMatrix m = OperatorMatrix::Zero(nu.dim(), nu.dim());
  for (const auto& term : spec.terms()) {
    m += monomial(nu, term.creation_power, term.annihilation_power, term.coeff.at(t));
  }
  return m;
}

struct HermiticityViolation {
  double t;
  double defect;
};

struct HermiticityReport {
  bool ok = true;
  double tolerance = 0.0;
  double max_defect = 0.0;
  std::vector<HermiticityViolation> violations;

  std::string describe() const {
    std::string out = "pump is not Hermitian at " + std::to_string(violations.size()) + " sampled time(s); max defect " +
                      std::to_string(max_defect) + " > tolerance " + std::to_string(tolerance);
    for (std::size_t i = 0; i < violations.size() && i < 4; ++i) {
      out += "; t=" + std::to_string(violations[i].t) + " defect=" + std::to_string(violations[i].defect);
    }
    return out;
  }
};

/// `count` uniform sample times on [0, t_max], endpoints included.
inline std::vector<double> uniform_sample_times(double t_max, int count = 32) {
  std::vector<double> ts;
  if (count <= 1) return {0.0};
  ts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) ts.push_back(t_max * k / (count - 1));
  return ts;
}

/// Samples ||A(t) - A(t)^dag||_HS; fails if any sample exceeds 1e-10 * d.
inline HermiticityReport validate_pump_hermitian(const PolynomialOperatorSpec& spec, TruncationLevel nu,
                                                 std::span<const double> sample_times) {
  if (sample_times.empty()) throw PreconditionError("validate_pump_hermitian needs at least one sample time");
  HermiticityReport report;
  report.tolerance = 1e-10 * static_cast<double>(nu.dim());
  for (double t : sample_times) {
    const double defect = hermiticity_defect(eval(spec, nu, t));
    report.max_defect = std::max(report.max_defect, defect);
    if (defect > report.tolerance) report.violations.push_back({t, defect});
  }
  report.ok = report.violations.empty();
  return report;
}

namespace presets {

/// V = a / sqrt(2): the double-commutator form then equals the standard
/// photon-loss term  a rho a^dag - (a^dag a rho + rho a^dag a) / 2.
inline PolynomialOperatorSpec photon_loss_d1() {
  return PolynomialOperatorSpec({{0, 1, TrigCoefficient::constant(Matrix2::Identity() / std::numbers::sqrt2)}});
}

/// V = a; the double-commutator form gives twice the standard photon-loss term.
inline PolynomialOperatorSpec photon_loss_raw() {
  return PolynomialOperatorSpec({{0, 1, TrigCoefficient::constant(Matrix2::Identity())}});
}

/// sigma_+ exp(-i omega_p t) + sigma_- exp(i omega_p t).
inline PolynomialOperatorSpec pump_collapse_revival(double omega_p) {
  return PolynomialOperatorSpec({{0, 0, TrigCoefficient({{pauli_matrix::sigma_plus(), -omega_p}})},
                                 {0, 0, TrigCoefficient({{pauli_matrix::sigma_minus(), omega_p}})}});
}

/// a^dag + a.
inline PolynomialOperatorSpec pump_displacement() {
  return PolynomialOperatorSpec({{1, 0, TrigCoefficient::constant(Matrix2::Identity())},
                                 {0, 1, TrigCoefficient::constant(Matrix2::Identity())}});
}

/// a^dag a.
inline PolynomialOperatorSpec pump_number() {
  return PolynomialOperatorSpec({{1, 1, TrigCoefficient::constant(Matrix2::Identity())}});
}

}  // namespace presets

/// Looks up a preset by name. `omega_p` is used only by pump_collapse_revival.
inline PolynomialOperatorSpec preset(std::string_view name, double omega_p = 1.0) {
  if (name == "photon_loss_D1") return presets::photon_loss_d1();
  if (name == "photon_loss_raw") return presets::photon_loss_raw();
  if (name == "pump_collapse_revival") return presets::pump_collapse_revival(omega_p);
  if (name == "pump_displacement") return presets::pump_displacement();
  if (name == "pump_number") return presets::pump_number();
  throw PreconditionError("unknown preset '" + std::string(name) + "'");
}

}  // namespace jcsim
