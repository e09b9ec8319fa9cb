#pragma once

// Orchestration of the three run modes and their bit-stable outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "jcsim/config.hpp"

namespace jcsim {

inline const char* const kObservablesHeader = "t,trace_re,trace_im,hs_norm,purity,min_eig,inversion,photon_number";
inline const char* const kConvergenceHeader = "entry,t,nu,re,im,diff_to_next";

inline std::string observables_csv(const TrajectoryRecord& rec) {
  using detail::format_double;
  std::string out = std::string(kObservablesHeader) + "\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    const auto& o = rec.observables[k];
    out += format_double(rec.times[k]) + "," + format_double(o.trace.real()) + "," + format_double(o.trace.imag()) +
           "," + format_double(o.hs_norm) + "," + format_double(o.purity) + "," + format_double(o.min_eigenvalue) +
           "," + format_double(o.inversion) + "," + format_double(o.photon_number) + "\n";
  }
  return out;
}

inline std::string convergence_csv(const ConvergenceTable& table) {
  using detail::format_double;
  std::string out = std::string(kConvergenceHeader) + "\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.levels.size(); ++k) {
      out += row.entry.label() + "," + format_double(row.t) + "," + std::to_string(row.levels[k]) + "," +
             format_double(row.values[k].real()) + "," + format_double(row.values[k].imag()) + ",";
      if (k < row.diffs.size()) out += format_double(row.diffs[k]);
      out += "\n";
    }
  }
  return out;
}

inline Json to_json(const ClaimReport& r, bool allow_listed) {
  Json j = {{"claim", r.claim},
            {"trials", r.trials},
            {"max_violation", r.max_violation},
            {"tolerance", r.tolerance},
            {"verdict", to_string(r.verdict)},
            {"allow_listed", allow_listed}};
  if (r.witness) {
    Json w = {{"nu", r.witness->rho.level().value()},
              {"rho", matrix_to_json(r.witness->rho.matrix())},
              {"t", r.witness->t},
              {"value", r.witness->value}};
    if (r.witness->v) w["V"] = to_json(*r.witness->v);
    j["witness"] = std::move(w);
  }
  return j;
}

struct RunOptions {
  bool quiet = false;
};

struct RunResult {
  int exit_code = 0;
  std::map<std::string, std::string> files;  // name -> contents
};

namespace detail {

inline IntegratorConfig record_free(IntegratorConfig cfg) {
  cfg.keep_snapshots = false;
  return cfg;
}

inline RunResult run_evolve(const RunConfig& cfg, const RunOptions& opts) {
  cfg.model.validate(cfg.integrator.t_max);
  const DensityMatrix rho0 = cfg.initial_state.build(cfg.model.nu);
  if (!opts.quiet && cfg.initial_state.kind == InitialState::Kind::coherent) {
    std::cerr << "note: coherent state tail weight beyond nu=" << cfg.model.nu.value() << " is "
              << coherent_tail_weight(cfg.initial_state.alpha, cfg.model.nu) << " (renormalized)\n";
  }
  const TrajectoryRecord rec = integrate(cfg.model, rho0, cfg.integrator);

  RunResult result;
  result.files["observables.csv"] = observables_csv(rec);
  Json summary = {{"accepted_steps", rec.accepted_steps},
                  {"hs_norm_max_ratio", rec.hs_norm_max_ratio},
                  {"max_hermiticity_defect", rec.max_hermiticity_defect},
                  {"max_trace_drift", rec.max_trace_drift},
                  {"min_eigenvalue_seen", rec.min_eigenvalue_seen},
                  {"records", rec.times.size()}};
  summary["first_norm_exceedance"] =
      rec.first_norm_exceedance ? Json(*rec.first_norm_exceedance) : Json(nullptr);
  result.files["summary.json"] = canonical_dump(summary);
  if (cfg.integrator.keep_snapshots) {
    Json snaps = Json::array();
    for (const auto& s : rec.snapshots) snaps.push_back({{"t", s.t}, {"rho", matrix_to_json(s.rho.matrix())}});
    result.files["snapshots.json"] = canonical_dump(Json{{"nu", cfg.model.nu.value()}, {"snapshots", snaps}});
  }
  return result;
}

inline RunResult run_sweep(const RunConfig& cfg, const RunOptions&) {
  if (!cfg.sweep) throw ConfigError("sweep", "required when mode is sweep");
  cfg.model.validate(cfg.integrator.t_max);
  SweepPlan plan;
  plan.model = cfg.model;
  plan.levels = cfg.sweep->levels;
  plan.probes = cfg.sweep->probes;
  plan.probe_times = cfg.sweep->probe_times;
  plan.integrator = record_free(cfg.integrator);
  plan.threshold = cfg.sweep->threshold;
  const ConvergenceTable table = sweep(plan, [&cfg](TruncationLevel nu) { return cfg.initial_state.build(nu); });

  RunResult result;
  result.files["convergence.csv"] = convergence_csv(table);
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"entry", r.entry.label()},
                    {"t", r.t},
                    {"strictly_decreasing", r.strictly_decreasing},
                    {"converging", r.converging}});
  }
  result.files["sweep_summary.json"] = canonical_dump(
      Json{{"verdict_is_heuristic", true}, {"threshold", table.threshold}, {"rows", rows},
           {"all_converging", table.all_converging()}});
  return result;
}

inline ClaimReport run_claim(const std::string& name, const RunConfig& cfg, long trials) {
  const ModelSpec& model = cfg.model;
  if (name == "k_orthogonality") return check_k_orthogonality(model, trials, cfg.seed);
  if (name == "trace_annihilation") return check_trace_annihilation(model, trials, cfg.seed);
  if (name == "dissipator_sign_hermitian") {
    return check_dissipator_sign(presets::pump_displacement(), model.nu, trials, cfg.seed, 0.0, name);
  }
  if (name == "dissipator_sign_raw") {
    return check_dissipator_sign(presets::photon_loss_raw(), model.nu, trials, cfg.seed, 0.0, name);
  }
  if (name == "dissipator_sign_model") {
    ClaimReport merged;
    merged.claim = name;
    merged.tolerance = 1e-10;
    for (const auto& v : model.dissipators) {
      ClaimReport r = check_dissipator_sign(v, model.nu, trials, cfg.seed, 0.0, name);
      merged.trials += r.trials;
      if (r.max_violation > merged.max_violation || (!merged.witness && r.witness)) {
        merged.max_violation = std::max(merged.max_violation, r.max_violation);
        merged.witness = r.witness;
      }
    }
    merged.verdict = merged.max_violation <= merged.tolerance ? Verdict::holds_within_tol : Verdict::violated;
    if (merged.verdict == Verdict::holds_within_tol) merged.witness.reset();
    return merged;
  }
  const std::vector<DensityMatrix> states{cfg.initial_state.build(model.nu)};
  const IntegratorConfig in = record_free(cfg.integrator);
  if (name == "contraction") return check_contraction(model, states, in);
  if (name == "trace_positivity") return check_trace_and_positivity(model, states, in);
  throw ConfigError("check.claims", "unknown claim '" + name + "'");
}

inline RunResult run_check(const RunConfig& cfg, const RunOptions& opts) {
  cfg.model.validate(cfg.integrator.t_max);
  const CheckSettings settings = cfg.check.value_or(CheckSettings{});
  RunResult result;
  Json reports = Json::array();
  bool asserted_hold = true;
  for (const auto& name : settings.claims) {
    const ClaimReport r = run_claim(name, cfg, settings.trials);
    const bool allowed =
        std::find(settings.allow_violated.begin(), settings.allow_violated.end(), name) != settings.allow_violated.end();
    if (r.verdict == Verdict::violated && !allowed) asserted_hold = false;
    if (!opts.quiet) {
      std::cerr << name << ": " << to_string(r.verdict) << " (max_violation " << r.max_violation << ")"
                << (allowed && r.verdict == Verdict::violated ? " [allow-listed]" : "") << "\n";
    }
    reports.push_back(to_json(r, allowed));
  }
  result.files["claims.json"] =
      canonical_dump(Json{{"all_asserted_hold", asserted_hold}, {"seed", cfg.seed}, {"claims", reports}});
  result.exit_code = asserted_hold ? 0 : 1;
  return result;
}

}  // namespace detail

/// Runs the configured mode; nothing is written until all computation is done.
inline RunResult execute(const RunConfig& cfg, const RunOptions& opts = {}) {
  switch (cfg.mode) {
    case Mode::evolve: return detail::run_evolve(cfg, opts);
    case Mode::sweep: return detail::run_sweep(cfg, opts);
    case Mode::check: return detail::run_check(cfg, opts);
  }
  throw ConfigError("mode", "unknown mode");
}

inline void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : result.files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write output file '" + (dir / name).string() + "'");
    out << contents;
  }
}

/// Structured error document printed on failure.
inline Json error_json(const Error& e) {
  Json j = {{"kind", e.kind()}, {"message", e.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["path"] = c->path();
  if (const auto* i = dynamic_cast<const IntegrationError*>(&e)) j["t_reached"] = i->t_reached();
  return Json{{"error", j}};
}

}  // namespace jcsim
