// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jcsim/jcsim.hpp"

using namespace jcsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

ModelSpec collapse_revival_model(int nu) {
  ModelSpec m;
  m.omega_c = 1.0;
  m.omega_a = 1.0;
  m.coupling = 0.1;
  m.gamma = 0.1;
  m.pump = presets::pump_collapse_revival(1.0);
  m.dissipators = {presets::photon_loss_d1()};
  m.nu = TruncationLevel(nu);
  return m;
}

IntegratorConfig rk4(double dt, double t_max, int record_every) {
  IntegratorConfig c;
  c.method = Method::rk4;
  c.dt = dt;
  c.t_max = t_max;
  c.record_every = record_every;
  return c;
}

Outcome ladder_algebra() {
  double pairing = 0.0, defect = 0.0;
  for (int nu : {1, 4, 16, 64}) {
    const TruncationLevel level(nu);
    const OperatorMatrix a = annihilation(level);
    const OperatorMatrix ad = creation(level);
    for (Eigen::Index i = 0; i < level.dim(); ++i)
      for (Eigen::Index j = 0; j < level.dim(); ++j) pairing = std::max(pairing, std::abs(a(i, j) - std::conj(ad(j, i))));
    OperatorMatrix expected = identity(level);
    for (Spin s : {Spin::up, Spin::down}) {
      const Eigen::Index top = BasisIndex{nu, s}.flat();
      expected(top, top) -= static_cast<double>(nu + 1);
    }
    defect = std::max(defect, (a * ad - ad * a - expected).cwiseAbs().maxCoeff());
  }
  return {pairing <= 1e-14 && defect <= 1e-13, fmt("pairing %.2e (<=1e-14), commutator %.2e (<=1e-13)", pairing, defect)};
}

Outcome exact_identities() {
  const ModelSpec m = collapse_revival_model(12);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> time(0.0, 2.0 * std::numbers::pi);
  const double d = static_cast<double>(m.nu.dim());
  double worst_k = 0.0, worst_tr = 0.0;
  for (int ti = 0; ti < 16; ++ti) {
    const double t = time(rng);
    const double h_norm = hamiltonian(m, t).norm();
    for (int k = 0; k < 1000; ++k) {
      const DensityMatrix rho = random_hermitian(m.nu, rng);
      worst_k = std::max(worst_k, std::abs(quadratic_form_k(m, t, rho)) / (rho.purity() * h_norm));
      worst_tr = std::max(worst_tr, std::abs(generator_apply(m, t, rho).trace()) / (d * rho.hs_norm()));
    }
  }
  return {worst_k <= 1e-12 && worst_tr <= 1e-12,
          fmt("max |Q_K|/scale %.2e, max |tr A rho|/scale %.2e (both <=1e-12)", worst_k, worst_tr)};
}

Outcome eigenbasis_identity() {
  const TruncationLevel nu(10);
  const OperatorMatrix a = annihilation(nu);
  const std::vector<OperatorMatrix> vs{a, a + a.adjoint(), a * a};
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const DensityMatrix rho = random_hermitian(nu, rng);
    for (const auto& v : vs) {
      const double scale = v.squaredNorm() * rho.purity();
      worst = std::max(worst, std::abs(eigenbasis_form(v, rho) - quadratic_form_d(v, rho)) / scale);
    }
  }
  return {worst <= 1e-10, fmt("max relative gap %.2e (<=1e-10)", worst)};
}

Outcome dissipator_sign() {
  const TruncationLevel nu(12);
  const OperatorMatrix v = eval(presets::pump_displacement(), nu, 0.0);
  const ClaimReport herm = check_dissipator_sign(presets::pump_displacement(), nu, 1000, 31);
  std::mt19937_64 rng(32);
  double sym_gap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const DensityMatrix rho = random_hermitian(nu, rng);
    const double scale = v.squaredNorm() * rho.purity();
    sym_gap = std::max(sym_gap, std::abs(symmetrized_form(v, rho) - quadratic_form_d(v, rho)) / scale);
  }
  const double pinned = quadratic_form_d(annihilation(nu), sign_witness_state(nu));
  const ClaimReport raw = check_dissipator_sign(presets::photon_loss_raw(), nu, 1000, 31);
  const bool raw_ok = raw.verdict == Verdict::violated && raw.witness && std::abs(raw.witness->value - 2.0) <= 1e-12;
  const bool ok = herm.verdict == Verdict::holds_within_tol && herm.max_violation <= 1e-10 && sym_gap <= 1e-10 &&
                  std::abs(pinned - 2.0) <= 1e-12 && raw_ok;
  return {ok, fmt("Hermitian V max %.2e, symmetrized gap %.2e, pinned witness %.15g, raw-V report %s (witness %.15g)",
                  herm.max_violation, sym_gap, pinned, to_string(raw.verdict), raw.witness ? raw.witness->value : 0.0)};
}

Outcome unitary_oracle_agreement() {
  ModelSpec m;
  m.coupling = 0.1;
  m.pump = presets::pump_displacement();
  m.nu = TruncationLevel(16);
  const DensityMatrix rho0 = state_coherent(Complex(2.0, 0.0), Spin::up, m.nu);
  const OperatorMatrix target = unitary_oracle(m, rho0, 5.0).matrix();
  const double e1 = (integrate(m, rho0, rk4(1e-3, 5.0, 1000000)).final_state->matrix() - target).norm();
  const double e2 = (integrate(m, rho0, rk4(5e-4, 5.0, 1000000)).final_state->matrix() - target).norm();
  const double ratio = e1 / e2;
  return {e1 <= 1e-6 && ratio >= 10.0 && ratio <= 24.0,
          fmt("error %.3e (<=1e-6), halving ratio %.3f (in [10,24])", e1, ratio)};
}

Outcome trace_positivity() {
  const ModelSpec m = collapse_revival_model(24);
  const DensityMatrix rho0 = state_coherent(Complex(1.0, 0.0), Spin::up, m.nu);
  const TrajectoryRecord rec = integrate(m, rho0, rk4(1e-3, 20.0, 1));
  double drift = rec.max_trace_drift;
  for (const auto& o : rec.observables) drift = std::max(drift, std::abs(o.trace - Complex(1.0)));
  return {drift <= 1e-8 && rec.min_eigenvalue_seen >= -1e-8,
          fmt("max |tr-1| %.2e, min eigenvalue %.2e over %zu steps", drift, rec.min_eigenvalue_seen, rec.times.size())};
}

Outcome decay_oracle() {
  ModelSpec m;
  m.gamma = 1.0;
  m.dissipators = {presets::photon_loss_d1()};
  m.nu = TruncationLevel(8);
  const TrajectoryRecord rec = integrate(m, state_fock(1, Spin::up, m.nu), rk4(1e-3, 5.0, 1));
  double worst = 0.0;
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    worst = std::max(worst, std::abs(rec.observables[k].photon_number - std::exp(-rec.times[k])));
  }
  return {worst <= 1e-6, fmt("max |n(t) - exp(-t)| %.2e over %zu records (<=1e-6)", worst, rec.times.size())};
}

Outcome piecewise_order() {
  const ModelSpec m = collapse_revival_model(24);
  const DensityMatrix rho0 = state_coherent(Complex(1.0, 0.0), Spin::up, m.nu);
  IntegratorConfig c = rk4(1e-3, 2.0, 1000000);
  const OperatorMatrix ref = integrate(m, rho0, c).final_state->matrix();
  c.method = Method::piecewise_const;
  c.epsilon = 0.1;
  const double e1 = (integrate(m, rho0, c).final_state->matrix() - ref).norm();
  c.epsilon = 0.05;
  const double e2 = (integrate(m, rho0, c).final_state->matrix() - ref).norm();
  const double ratio = e1 / e2;
  return {ratio >= 1.6 && ratio <= 2.4, fmt("errors %.3e / %.3e, ratio %.3f (in [1.6,2.4])", e1, e2, ratio)};
}

Outcome truncation_convergence() {
  SweepPlan plan;
  plan.model = collapse_revival_model(8);
  plan.levels = {8, 16, 24, 32};
  plan.probes = {{{0, Spin::up}, {0, Spin::up}}};
  plan.probe_times = {2.0};
  plan.integrator = rk4(1e-3, 2.0, 1);
  const ConvergenceTable table =
      sweep(plan, [](TruncationLevel nu) { return state_coherent(Complex(1.0, 0.0), Spin::up, nu); });
  const ConvergenceRow& row = table.rows.at(0);
  std::string diffs;
  for (double d : row.diffs) diffs += fmt("%s%.3e", diffs.empty() ? "" : ", ", d);
  const bool ok = row.strictly_decreasing && row.diffs.back() <= 1e-6;
  const bool exact_ties = std::count(row.diffs.begin(), row.diffs.end(), 0.0) > 1;
  return {ok, fmt("diffs [%s]; strictly decreasing %s, final <=1e-6 %s%s", diffs.c_str(),
                  row.strictly_decreasing ? "yes" : "no", row.diffs.back() <= 1e-6 ? "yes" : "no",
                  exact_ties ? " (higher levels agree bit-for-bit)" : "")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const Json base = Json::parse(R"({
    "seed": 17,
    "model": {"omega_c": 1.0, "omega_a": 1.0, "coupling": 0.1, "gamma": 0.1, "nu": 8,
              "pump": {"preset": "pump_collapse_revival", "omega_p": 1.0},
              "dissipators": [{"preset": "photon_loss_D1"}]},
    "initial_state": {"kind": "coherent", "alpha": [1.0, 0.0], "s": "+"},
    "integrator": {"method": "rk4", "dt": 0.001, "t_max": 2.0, "record_every": 10, "snapshots": true},
    "sweep": {"levels": [4, 8, 12], "probe_entries": ["0+;0+", "1+;0-"], "probe_times": [1.0, 2.0]},
    "check": {"trials": 200}
  })");
  int compared = 0;
  bool same = true;
  for (const char* mode : {"evolve", "sweep", "check"}) {
    Json j = base;
    j["mode"] = mode;
    const RunConfig cfg = config_from_json(j);
    const RunResult x = execute(cfg, {true});
    const RunResult y = execute(cfg, {true});
    same = same && x.files == y.files && x.exit_code == y.exit_code;
    compared += static_cast<int>(x.files.size());
  }
#ifdef JCSIM_CLI_PATH
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "jcsim_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* mode : {"evolve", "sweep", "check"}) {
    Json j = base;
    j["mode"] = mode;
    const fs::path cfg = dir / (std::string(mode) + ".json");
    std::ofstream(cfg) << j.dump();
    for (const char* run : {"a", "b"}) {
      const std::string cmd = std::string(JCSIM_CLI_PATH) + " --quiet --config " + cfg.string() + " --output-dir " +
                              (dir / mode / run).string();
      if (std::system(cmd.c_str()) != 0) return {false, fmt("CLI run failed in %s mode", mode)};
    }
    for (const auto& entry : fs::directory_iterator(dir / mode / "a")) {
      same = same && slurp(entry.path()) == slurp(dir / mode / "b" / entry.path().filename());
      ++compared;
    }
  }
#endif
  return {same, fmt("%d output files compared byte-for-byte", compared)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "ladder algebra", 1.0, ladder_algebra},
      {2, "exact identities", 10.0, exact_identities},
      {3, "eigenbasis identity", 10.0, eigenbasis_identity},
      {4, "dissipator sign", 10.0, dissipator_sign},
      {5, "unitary oracle agreement", 30.0, unitary_oracle_agreement},
      {6, "trace and positivity", 60.0, trace_positivity},
      {7, "photon decay oracle", 10.0, decay_oracle},
      {8, "piecewise-constant order", 30.0, piecewise_order},
      {9, "truncation convergence", 120.0, truncation_convergence},
      {10, "CLI determinism", 60.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %-26s %7.2fs (<%gs)  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str(), in_time ? "" : "  [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
