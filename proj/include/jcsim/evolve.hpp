#pragma once

// Time integration of  d rho / dt = A(t) rho  on the truncated space.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jcsim/lindblad.hpp"

namespace jcsim {

enum class Method { rk4, rk45, unitary_exact, piecewise_const };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::rk4: return "rk4";
    case Method::rk45: return "rk45";
    case Method::unitary_exact: return "unitary_exact";
    case Method::piecewise_const: return "piecewise_const";
  }
  return "unknown";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  if (s == "rk4") return Method::rk4;
  if (s == "rk45") return Method::rk45;
  if (s == "unitary_exact") return Method::unitary_exact;
  if (s == "piecewise_const") return Method::piecewise_const;
  return std::nullopt;
}

/// rk4 step of 1e-3 cavity periods.
inline double default_dt(double omega_c) { return 1e-3 * 2.0 * std::numbers::pi / omega_c; }

struct IntegratorConfig {
  Method method = Method::rk4;
  double dt = 1e-3;  // rk4 step, rk45 initial step, piecewise_const substep
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_max = 1.0;
  int record_every = 1;
  double epsilon = 0.1;  // piecewise_const window
  bool keep_snapshots = false;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("integrator.dt must be > 0");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw PreconditionError("integrator.t_max must be > 0");
    if (t_max < dt) throw PreconditionError("integrator.t_max must be >= integrator.dt");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("integrator tolerances must be > 0");
    if (record_every < 1) throw PreconditionError("integrator.record_every must be >= 1");
    if (!(epsilon > 0.0)) throw PreconditionError("integrator.epsilon must be > 0");
  }
};

struct Snapshot {
  double t;
  DensityMatrix rho;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ObservableSet> observables;
  std::vector<Snapshot> snapshots;
  double max_hermiticity_defect = 0.0;  // before each re-Hermitization
  double min_eigenvalue_seen = std::numeric_limits<double>::infinity();  // over recorded times
  double hs_norm_max_ratio = 1.0;  // max_t ||rho(t)|| / ||rho(0)||, every step
  double max_trace_drift = 0.0;    // max_t |tr rho(t) - tr rho(0)|, every step
  std::optional<double> first_norm_exceedance;  // first t with ratio > 1 + 1e-6
  long accepted_steps = 0;
  std::optional<DensityMatrix> final_state;
};

/// Exact propagation e^{-iHt} rho e^{iHt} for autonomous models without damping.
class UnitaryPropagator {
 public:
  explicit UnitaryPropagator(const ModelSpec& model) : nu_(model.nu) {
    if (model.gamma > 0.0) throw PreconditionError("unitary oracle requires gamma = 0");
    if (!model.pump.time_independent()) throw PreconditionError("unitary oracle requires a time-independent pump");
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(hamiltonian(model, 0.0));
    if (es.info() != Eigen::Success) throw Error("unitary oracle: eigendecomposition failed");
    energies_ = es.eigenvalues();
    basis_ = es.eigenvectors();
  }

  OperatorMatrix unitary(double t) const {
    const Eigen::VectorXcd phases = (Complex(0.0, -t) * energies_.cast<Complex>()).array().exp();
    return basis_ * phases.asDiagonal() * basis_.adjoint();
  }

  DensityMatrix evolve(const DensityMatrix& rho0, double t) const {
    require_same_dim(basis_, rho0.matrix(), "unitary_oracle");
    const OperatorMatrix u = unitary(t);
    OperatorMatrix r = u * rho0.matrix() * u.adjoint();
    r = 0.5 * (r + r.adjoint()).eval();
    return {nu_, std::move(r)};
  }

 private:
  TruncationLevel nu_;
  Eigen::VectorXd energies_;
  OperatorMatrix basis_;
};

inline DensityMatrix unitary_oracle(const ModelSpec& model, const DensityMatrix& rho0, double t) {
  return UnitaryPropagator(model).evolve(rho0, t);
}

namespace detail {

using Rhs = std::function<OperatorMatrix(double, const OperatorMatrix&)>;

// Per-step bookkeeping shared by all methods.
class Tracker {
 public:
  Tracker(const DensityMatrix& rho0, const IntegratorConfig& cfg, TrajectoryRecord* rec)
      : nu_(rho0.level()), cfg_(cfg), rec_(rec), norm0_(rho0.hs_norm()), trace0_(rho0.trace()) {}

  // Re-Hermitizes rho in place and updates the running diagnostics.
  void accept(double t, OperatorMatrix& rho) {
    if (!rho.allFinite()) throw IntegrationError("non-finite density matrix entries at t=" + std::to_string(t), last_t_);
    if (rec_ == nullptr) {
      rho = 0.5 * (rho + rho.adjoint()).eval();
      last_t_ = t;
      return;
    }
    rec_->max_hermiticity_defect = std::max(rec_->max_hermiticity_defect, hermiticity_defect(rho));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rec_->max_trace_drift = std::max(rec_->max_trace_drift, std::abs(rho.trace() - trace0_));
    if (norm0_ > 0.0) {
      const double ratio = rho.norm() / norm0_;
      rec_->hs_norm_max_ratio = std::max(rec_->hs_norm_max_ratio, ratio);
      if (ratio > 1.0 + 1e-6 && !rec_->first_norm_exceedance) rec_->first_norm_exceedance = t;
    }
    ++rec_->accepted_steps;
    last_t_ = t;
  }

  void record(double t, const OperatorMatrix& rho) {
    if (rec_ == nullptr) return;
    DensityMatrix state(nu_, rho);
    const ObservableSet obs = observables(state);
    rec_->times.push_back(t);
    rec_->observables.push_back(obs);
    rec_->min_eigenvalue_seen = std::min(rec_->min_eigenvalue_seen, obs.min_eigenvalue);
    if (cfg_.keep_snapshots) rec_->snapshots.push_back({t, std::move(state)});
  }

  // Records after the k-th accepted step (1-based) unless it is the final one.
  void maybe_record(long k, bool final_step, double t, const OperatorMatrix& rho) {
    if (!final_step && k % cfg_.record_every == 0) record(t, rho);
  }

  double last_t() const { return last_t_; }

 private:
  TruncationLevel nu_;
  const IntegratorConfig& cfg_;
  TrajectoryRecord* rec_;
  double norm0_;
  Complex trace0_;
  double last_t_ = 0.0;
};

inline OperatorMatrix rk4_step(const Rhs& f, double t, double h, const OperatorMatrix& y) {
  const OperatorMatrix k1 = f(t, y);
  const OperatorMatrix k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const OperatorMatrix k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const OperatorMatrix k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline long fixed_step_count(double span, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
}

// Fixed-step rk4 on [t0, t1]; the last step is shortened to land on t1.
// `step_counter` continues across segments.
inline OperatorMatrix run_rk4(const Rhs& f, OperatorMatrix y, double t0, double t1, double dt, Tracker& tracker,
                              long& step_counter, bool last_segment) {
  const long n = fixed_step_count(t1 - t0, dt);
  for (long k = 1; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k - 1) * dt;
    const double t_next = (k == n) ? t1 : t0 + static_cast<double>(k) * dt;
    y = rk4_step(f, t, t_next - t, y);
    tracker.accept(t_next, y);
    ++step_counter;
    tracker.maybe_record(step_counter, last_segment && k == n, t_next, y);
  }
  return y;
}

// Dormand-Prince 5(4) with the usual step-size controller.
inline OperatorMatrix run_rk45(const Rhs& f, OperatorMatrix y, double t0, double t1, const IntegratorConfig& cfg,
                               Tracker& tracker) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = t0;
  double h = std::min(cfg.dt, t1 - t0);
  long accepted = 0;
  while (t < t1) {
    bool final_step = false;
    if (t + h >= t1 || (t1 - (t + h)) < 1e-12 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }
    if (h < 1e-12 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("rk45 step size underflow at t=" + std::to_string(t), t);
    }
    const OperatorMatrix k1 = f(t, y);
    const OperatorMatrix k2 = f(t + c2 * h, y + h * (a21 * k1));
    const OperatorMatrix k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const OperatorMatrix k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const OperatorMatrix k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const OperatorMatrix k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    OperatorMatrix y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const OperatorMatrix k7 = f(t + h, y_new);
    const OperatorMatrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const Eigen::ArrayXXd scale =
        cfg.abs_tol + cfg.rel_tol * y.cwiseAbs().array().max(y_new.cwiseAbs().array());
    const double err_norm = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    if (!std::isfinite(err_norm)) throw IntegrationError("non-finite error estimate at t=" + std::to_string(t), t);

    const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    if (err_norm <= 1.0) {
      t = final_step ? t1 : t + h;
      y = std::move(y_new);
      tracker.accept(t, y);
      ++accepted;
      tracker.maybe_record(accepted, final_step, t, y);
      if (final_step) break;
    }
    h *= factor;
  }
  return y;
}

// Windows [eps*w, eps*(w+1)) intersected with [t0, t1]; on each the
// generator is frozen at t = eps*w.
inline OperatorMatrix run_piecewise(const Generator& gen, OperatorMatrix y, double t0, double t1,
                                    const IntegratorConfig& cfg, Tracker& tracker, long& step_counter) {
  const double eps = cfg.epsilon;
  long w = static_cast<long>(std::floor(t0 / eps + 1e-9));
  double t = t0;
  while (t < t1) {
    const double t_freeze = static_cast<double>(w) * eps;
    double t_end = static_cast<double>(w + 1) * eps;
    const bool last = t_end >= t1 - 1e-9 * eps;
    if (last) t_end = t1;
    const Rhs frozen = [&gen, t_freeze](double, const OperatorMatrix& r) { return gen.apply(t_freeze, r); };
    y = run_rk4(frozen, std::move(y), t, t_end, cfg.dt, tracker, step_counter, last);
    t = t_end;
    ++w;
  }
  return y;
}

inline void check_inputs(const ModelSpec& model, const DensityMatrix& rho0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (rho0.level() != model.nu) {
    throw DimensionMismatch("initial state level " + std::to_string(rho0.level().value()) +
                            " does not match model level " + std::to_string(model.nu.value()));
  }
}

}  // namespace detail

/// Integrates over [0, cfg.t_max] with coefficients frozen at t = eps*n on
/// each window [eps*n, eps*(n+1)); rk4 substeps of cfg.dt inside a window.
inline TrajectoryRecord integrate_piecewise_const(const ModelSpec& model, const DensityMatrix& rho0,
                                                  const IntegratorConfig& cfg) {
  detail::check_inputs(model, rho0, cfg);
  TrajectoryRecord rec;
  detail::Tracker tracker(rho0, cfg, &rec);
  const Generator gen(model);

  OperatorMatrix y = rho0.matrix();
  tracker.record(0.0, y);
  long steps = 0;
  y = detail::run_piecewise(gen, std::move(y), 0.0, cfg.t_max, cfg, tracker, steps);
  tracker.record(cfg.t_max, y);
  rec.final_state.emplace(rho0.level(), std::move(y));
  return rec;
}

/// Integrates the master equation over [0, cfg.t_max].
///
/// After every accepted step rho is replaced by (rho + rho^dag)/2 and the
/// defect is recorded. Observables are recorded at t = 0, every
/// cfg.record_every accepted steps, and at t_max. Negative eigenvalues are
/// recorded, never clipped.
inline TrajectoryRecord integrate(const ModelSpec& model, const DensityMatrix& rho0, const IntegratorConfig& cfg) {
  if (cfg.method == Method::piecewise_const) return integrate_piecewise_const(model, rho0, cfg);
  detail::check_inputs(model, rho0, cfg);

  TrajectoryRecord rec;
  detail::Tracker tracker(rho0, cfg, &rec);
  OperatorMatrix y = rho0.matrix();
  tracker.record(0.0, y);

  switch (cfg.method) {
    case Method::rk4: {
      const Generator gen(model);
      const detail::Rhs f = [&gen](double t, const OperatorMatrix& r) { return gen.apply(t, r); };
      long steps = 0;
      y = detail::run_rk4(f, std::move(y), 0.0, cfg.t_max, cfg.dt, tracker, steps, true);
      break;
    }
    case Method::rk45: {
      const Generator gen(model);
      const detail::Rhs f = [&gen](double t, const OperatorMatrix& r) { return gen.apply(t, r); };
      y = detail::run_rk45(f, std::move(y), 0.0, cfg.t_max, cfg, tracker);
      break;
    }
    case Method::unitary_exact: {
      const UnitaryPropagator prop(model);
      const long n = detail::fixed_step_count(cfg.t_max, cfg.dt);
      for (long k = 1; k <= n; ++k) {
        const double t = (k == n) ? cfg.t_max : static_cast<double>(k) * cfg.dt;
        y = prop.evolve(rho0, t).matrix();
        tracker.accept(t, y);
        tracker.maybe_record(k, k == n, t, y);
      }
      break;
    }
    case Method::piecewise_const: break;
  }
  tracker.record(cfg.t_max, y);
  rec.final_state.emplace(rho0.level(), std::move(y));
  return rec;
}

/// Advances rho from t_from to t_to with the configured method (no records).
inline DensityMatrix propagate(const ModelSpec& model, const DensityMatrix& rho, double t_from, double t_to,
                               const IntegratorConfig& cfg) {
  if (t_to < t_from) throw PreconditionError("propagate: t_to < t_from");
  if (rho.level() != model.nu) throw DimensionMismatch("propagate: state level does not match model level");
  if (t_to == t_from) return rho;
  detail::Tracker tracker(rho, cfg, nullptr);
  switch (cfg.method) {
    case Method::unitary_exact: {
      const UnitaryPropagator prop(model);
      const OperatorMatrix u = prop.unitary(t_to - t_from);
      OperatorMatrix r = u * rho.matrix() * u.adjoint();
      return {rho.level(), 0.5 * (r + r.adjoint())};
    }
    case Method::rk45: {
      const Generator gen(model);
      const detail::Rhs f = [&gen](double t, const OperatorMatrix& r) { return gen.apply(t, r); };
      return {rho.level(), detail::run_rk45(f, rho.matrix(), t_from, t_to, cfg, tracker)};
    }
    case Method::rk4: {
      const Generator gen(model);
      const detail::Rhs f = [&gen](double t, const OperatorMatrix& r) { return gen.apply(t, r); };
      long steps = 0;
      return {rho.level(), detail::run_rk4(f, rho.matrix(), t_from, t_to, cfg.dt, tracker, steps, true)};
    }
    case Method::piecewise_const: {
      const Generator gen(model);
      long steps = 0;
      return {rho.level(), detail::run_piecewise(gen, rho.matrix(), t_from, t_to, cfg, tracker, steps)};
    }
  }
  throw PreconditionError("propagate: unknown method");
}

}  // namespace jcsim
