#pragma once

// Randomized and targeted checks of the contraction, trace and positivity
// properties of the truncated dynamics. A claim that fails numerically is
// reported as "violated" with a replayable witness; it is not an error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jcsim/evolve.hpp"

namespace jcsim {

enum class Verdict { holds_within_tol, violated };

inline const char* to_string(Verdict v) { return v == Verdict::holds_within_tol ? "holds_within_tol" : "violated"; }

struct Witness {
  DensityMatrix rho;
  std::optional<PolynomialOperatorSpec> v;
  double t = 0.0;
  double value = 0.0;  // the raw quantity the claim bounds
};

struct ClaimReport {
  std::string claim;
  long trials = 0;
  double max_violation = 0.0;  // normalized; compared against tolerance
  double tolerance = 0.0;
  Verdict verdict = Verdict::holds_within_tol;
  std::optional<Witness> witness;  // present iff violated
};

/// Complex Gaussian entries, then (M + M^dag) / 2.
template <class Rng>
DensityMatrix random_hermitian(TruncationLevel nu, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index d = nu.dim();
  OperatorMatrix m(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) m(r, c) = Complex(g(rng), g(rng));
  }
  return {nu, 0.5 * (m + m.adjoint())};
}

/// Unit-trace pure state from a complex Gaussian vector.
template <class Rng>
DensityMatrix random_pure(TruncationLevel nu, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd psi(nu.dim());
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = Complex(g(rng), g(rng));
  psi /= psi.norm();
  OperatorMatrix m = psi * psi.adjoint();
  return {nu, 0.5 * (m + m.adjoint())};
}

/// 2|0,+><0,+| + |1,+><1,+|: the diagonal state on which tr(rho D_a rho) = +2.
inline DensityMatrix sign_witness_state(TruncationLevel nu) {
  OperatorMatrix m = OperatorMatrix::Zero(nu.dim(), nu.dim());
  m(BasisIndex{0, Spin::up}.flat(), BasisIndex{0, Spin::up}.flat()) = 2.0;
  m(BasisIndex{1, Spin::up}.flat(), BasisIndex{1, Spin::up}.flat()) = 1.0;
  return {nu, std::move(m)};
}

/// Diagonal, rank-1 and maximally mixed states that every randomized check also visits.
inline std::vector<DensityMatrix> targeted_corpus(TruncationLevel nu) {
  std::vector<DensityMatrix> out;
  out.push_back(sign_witness_state(nu));
  out.push_back(state_fock(1, Spin::up, nu));
  out.push_back(state_coherent(Complex(1.0, 0.5), Spin::down, nu));
  out.emplace_back(nu, identity(nu) / static_cast<double>(nu.dim()));
  return out;
}

namespace detail {

inline void finish(ClaimReport& r) {
  r.verdict = r.max_violation <= r.tolerance ? Verdict::holds_within_tol : Verdict::violated;
  if (r.verdict == Verdict::holds_within_tol) r.witness.reset();
}

// Keeps the witness of the largest normalized violation seen so far.
inline void consider(ClaimReport& r, double normalized, const Witness& w) {
  if (normalized > r.max_violation || (!r.witness && normalized > r.tolerance)) {
    r.max_violation = std::max(r.max_violation, normalized);
    r.witness = w;
  }
}

inline double coefficient_period(const ModelSpec& model) {
  const double w = model.min_frequency();
  return w > 0.0 ? 2.0 * std::numbers::pi / w : 10.0;
}

}  // namespace detail

/// tr(rho D_V rho) <= 0, tested on the targeted corpus plus `trials` random
/// Hermitian states. Normalized by ||V||_HS^2 ||rho||_HS^2; tolerance 1e-10.
inline ClaimReport check_dissipator_sign(const PolynomialOperatorSpec& vspec, TruncationLevel nu, long trials,
                                         std::uint64_t seed, double t = 0.0, std::string claim = "dissipator_sign") {
  if (trials < 1) throw PreconditionError("check_dissipator_sign: trials must be >= 1");
  ClaimReport report;
  report.claim = std::move(claim);
  report.tolerance = 1e-10;
  const OperatorMatrix v = eval(vspec, nu, t);
  const double v_norm2 = v.squaredNorm();

  auto test = [&](const DensityMatrix& rho) {
    const double value = quadratic_form_d(v, rho);
    const double scale = std::max(1e-300, v_norm2 * rho.purity());
    ++report.trials;
    detail::consider(report, value / scale, Witness{rho, vspec, t, value});
  };

  for (const auto& rho : targeted_corpus(nu)) test(rho);
  std::mt19937_64 rng(seed);
  for (long k = 0; k < trials; ++k) test(random_hermitian(nu, rng));
  detail::finish(report);
  return report;
}

/// Recomputes the witness value of a dissipator-sign report.
inline double replay_dissipator_sign(const Witness& w) {
  if (!w.v) throw PreconditionError("witness carries no dissipation polynomial");
  return quadratic_form_d(eval(*w.v, w.rho.level(), w.t), w.rho);
}

/// tr(rho K(t) rho) = 0 for random Hermitian rho and t; normalized by
/// ||rho||^2 ||H(t)||; tolerance 1e-12.
inline ClaimReport check_k_orthogonality(const ModelSpec& model, long trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("check_k_orthogonality: trials must be >= 1");
  ClaimReport report;
  report.claim = "k_orthogonality";
  report.tolerance = 1e-12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, detail::coefficient_period(model));
  for (long k = 0; k < trials; ++k) {
    const DensityMatrix rho = random_hermitian(model.nu, rng);
    const double t = time(rng);
    const double value = quadratic_form_k(model, t, rho);
    const double scale = std::max(1e-300, rho.purity() * hamiltonian(model, t).norm());
    ++report.trials;
    detail::consider(report, std::abs(value) / scale, Witness{rho, std::nullopt, t, value});
  }
  detail::finish(report);
  return report;
}

/// tr(A(t) rho) = 0 for random Hermitian rho and t; normalized by d ||rho||; tolerance 1e-12.
inline ClaimReport check_trace_annihilation(const ModelSpec& model, long trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("check_trace_annihilation: trials must be >= 1");
  ClaimReport report;
  report.claim = "trace_annihilation";
  report.tolerance = 1e-12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, detail::coefficient_period(model));
  const double d = static_cast<double>(model.nu.dim());
  for (long k = 0; k < trials; ++k) {
    const DensityMatrix rho = random_hermitian(model.nu, rng);
    const double t = time(rng);
    const double value = std::abs(generator_apply(model, t, rho).trace());
    ++report.trials;
    detail::consider(report, value / (d * rho.hs_norm()), Witness{rho, std::nullopt, t, value});
  }
  detail::finish(report);
  return report;
}

/// ||rho(t)||_HS <= ||rho(0)||_HS along integrated trajectories; tolerance 1e-6
/// on the ratio. The witness time is the first exceedance.
inline ClaimReport check_contraction(const ModelSpec& model, std::span<const DensityMatrix> states,
                                     const IntegratorConfig& cfg) {
  if (states.empty()) throw PreconditionError("check_contraction: states must be nonempty");
  ClaimReport report;
  report.claim = "contraction";
  report.tolerance = 1e-6;
  for (const auto& rho0 : states) {
    const TrajectoryRecord rec = integrate(model, rho0, cfg);
    ++report.trials;
    detail::consider(report, std::max(0.0, rec.hs_norm_max_ratio - 1.0),
                     Witness{rho0, std::nullopt, rec.first_norm_exceedance.value_or(0.0), rec.hs_norm_max_ratio});
  }
  detail::finish(report);
  return report;
}

/// |tr rho(t) - 1| <= 1e-8, min eigenvalue >= -1e-8 and Hermiticity defect
/// per step <= 1e-10 d along integrated trajectories. The defect is rescaled
/// onto the common 1e-8 tolerance.
inline ClaimReport check_trace_and_positivity(const ModelSpec& model, std::span<const DensityMatrix> states,
                                              const IntegratorConfig& cfg) {
  if (states.empty()) throw PreconditionError("check_trace_and_positivity: states must be nonempty");
  ClaimReport report;
  report.claim = "trace_positivity";
  report.tolerance = 1e-8;
  const double d = static_cast<double>(model.nu.dim());
  for (const auto& rho0 : states) {
    if (std::abs(rho0.trace() - 1.0) > 1e-12 || !rho0.is_psd(1e-12)) {
      throw PreconditionError("check_trace_and_positivity: initial states must be unit-trace and PSD");
    }
    const TrajectoryRecord rec = integrate(model, rho0, cfg);
    double worst_t = 0.0;
    double worst_eig = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      if (rec.observables[k].min_eigenvalue < worst_eig) {
        worst_eig = rec.observables[k].min_eigenvalue;
        worst_t = rec.times[k];
      }
    }
    const double violation = std::max({rec.max_trace_drift, -rec.min_eigenvalue_seen,
                                       rec.max_hermiticity_defect * (1e-8 / (1e-10 * d))});
    ++report.trials;
    detail::consider(report, violation, Witness{rho0, std::nullopt, worst_t, violation});
  }
  detail::finish(report);
  return report;
}

}  // namespace jcsim
