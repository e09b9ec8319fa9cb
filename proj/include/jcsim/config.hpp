#pragma once

// JSON run configuration: parsing with JSON-path error reporting, and a
// canonical serializer (sorted keys, complex numbers as [re, im], doubles
// with 17 significant digits) so outputs are byte-reproducible.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jcsim/claims.hpp"
#include "jcsim/converge.hpp"

namespace jcsim {

using Json = nlohmann::json;

enum class Mode { evolve, sweep, check };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::evolve: return "evolve";
    case Mode::sweep: return "sweep";
    case Mode::check: return "check";
  }
  return "unknown";
}

inline std::optional<Mode> mode_from_string(const std::string& s) {
  if (s == "evolve") return Mode::evolve;
  if (s == "sweep") return Mode::sweep;
  if (s == "check") return Mode::check;
  return std::nullopt;
}

struct InitialState {
  enum class Kind { fock, coherent, thermal, matrix };
  Kind kind = Kind::fock;
  int n = 0;
  Spin s = Spin::up;
  Complex alpha{0.0, 0.0};
  double mean_n = 0.0;
  std::optional<DensityMatrix> explicit_matrix;

  /// The state at level nu. Explicit matrices are zero-padded or truncated.
  DensityMatrix build(TruncationLevel nu) const {
    switch (kind) {
      case Kind::fock: return state_fock(n, s, nu);
      case Kind::coherent: return state_coherent(alpha, s, nu);
      case Kind::thermal: return state_thermal(mean_n, s, nu);
      case Kind::matrix: {
        const DensityMatrix& m = *explicit_matrix;
        return nu >= m.level() ? embed(m, nu) : truncate(m, nu);
      }
    }
    throw PreconditionError("unknown initial state kind");
  }
};

struct SweepSettings {
  std::vector<int> levels;
  std::vector<ProbeEntry> probes;
  std::vector<double> probe_times;
  double threshold = 1e-6;
};

inline const std::vector<std::string>& known_claims() {
  static const std::vector<std::string> names{"k_orthogonality",         "trace_annihilation",
                                              "dissipator_sign_hermitian", "dissipator_sign_raw",
                                              "dissipator_sign_model",   "contraction",
                                              "trace_positivity"};
  return names;
}

struct CheckSettings {
  std::vector<std::string> claims{"k_orthogonality",     "trace_annihilation", "dissipator_sign_hermitian",
                                  "dissipator_sign_raw", "contraction",        "trace_positivity"};
  std::vector<std::string> allow_violated{"dissipator_sign_raw"};
  long trials = 1000;
};

struct RunConfig {
  ModelSpec model;
  InitialState initial_state;
  IntegratorConfig integrator;
  Mode mode = Mode::evolve;
  std::optional<SweepSettings> sweep;
  std::optional<CheckSettings> check;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Canonical JSON text

namespace detail {

inline std::string format_double(double x) {
  if (!std::isfinite(x)) throw Error("cannot serialize non-finite number to JSON");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_canonical(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys already sorted
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        write_canonical(it.value(), out, indent, depth + 1);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (complex numbers) stay on one line.
      const bool inline_array = j.size() <= 2 && std::all_of(j.begin(), j.end(), [](const Json& e) {
                                  return e.is_number();
                                });
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ",";
        if (!inline_array) out += nl + pad;
        first = false;
        write_canonical(e, out, inline_array ? 0 : indent, depth + 1);
      }
      if (!inline_array) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Sorted keys, doubles as %.17g, two-space indent, trailing newline.
inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::write_canonical(j, out, 2, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Encoders

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Matrix2& m) {
  return Json::array({Json::array({to_json(m(0, 0)), to_json(m(0, 1))}),
                      Json::array({to_json(m(1, 0)), to_json(m(1, 1))})});
}

inline Json matrix_to_json(const OperatorMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const PolynomialOperatorSpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms()) {
    Json coeff = Json::array();
    for (const auto& c : t.coeff.components()) coeff.push_back({{"C", to_json(c.coeff)}, {"omega", c.omega}});
    terms.push_back({{"l", t.creation_power}, {"lp", t.annihilation_power}, {"coeff", std::move(coeff)}});
  }
  return {{"terms", std::move(terms)}};
}

inline Json to_json(const InitialState& s) {
  switch (s.kind) {
    case InitialState::Kind::fock: return {{"kind", "fock"}, {"n", s.n}, {"s", std::string(1, to_char(s.s))}};
    case InitialState::Kind::coherent:
      return {{"kind", "coherent"}, {"alpha", to_json(s.alpha)}, {"s", std::string(1, to_char(s.s))}};
    case InitialState::Kind::thermal:
      return {{"kind", "thermal"}, {"mean_n", s.mean_n}, {"s", std::string(1, to_char(s.s))}};
    case InitialState::Kind::matrix:
      return {{"kind", "matrix"},
              {"nu", s.explicit_matrix->level().value()},
              {"entries", matrix_to_json(s.explicit_matrix->matrix())}};
  }
  return {};
}

inline Json to_json(const RunConfig& cfg) {
  Json dissipators = Json::array();
  for (const auto& v : cfg.model.dissipators) dissipators.push_back(to_json(v));
  Json j;
  j["mode"] = to_string(cfg.mode);
  j["seed"] = cfg.seed;
  j["model"] = {{"omega_c", cfg.model.omega_c}, {"omega_a", cfg.model.omega_a}, {"coupling", cfg.model.coupling},
                {"gamma", cfg.model.gamma},     {"nu", cfg.model.nu.value()},  {"pump", to_json(cfg.model.pump)},
                {"dissipators", dissipators}};
  j["initial_state"] = to_json(cfg.initial_state);
  const auto& in = cfg.integrator;
  j["integrator"] = {{"method", std::string(to_string(in.method))},
                     {"dt", in.dt},
                     {"t_max", in.t_max},
                     {"rel_tol", in.rel_tol},
                     {"abs_tol", in.abs_tol},
                     {"record_every", in.record_every},
                     {"epsilon", in.epsilon},
                     {"snapshots", in.keep_snapshots}};
  if (cfg.sweep) {
    Json probes = Json::array();
    for (const auto& p : cfg.sweep->probes) probes.push_back(p.label());
    j["sweep"] = {{"levels", cfg.sweep->levels},
                  {"probe_entries", probes},
                  {"probe_times", cfg.sweep->probe_times},
                  {"threshold", cfg.sweep->threshold}};
  }
  if (cfg.check) {
    j["check"] = {{"claims", cfg.check->claims},
                  {"allow_violated", cfg.check->allow_violated},
                  {"trials", cfg.check->trials}};
  }
  j["outputs"] = {{"directory", cfg.output_dir}};
  return j;
}

// ---------------------------------------------------------------------------
// Decoders. Every failure names the JSON path of the offending field.

namespace detail {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(path, key), "missing required field");
  return *it;
}

inline const Json* optional_field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
      throw ConfigError(join(path, it.key()), "unknown field");
    }
  }
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

inline long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long>();
}

inline std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline Complex complex_number(const Json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a complex number [re, im]");
  return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
}

inline Spin spin(const Json& j, const std::string& path) {
  const std::string s = string(j, path);
  if (s == "+") return Spin::up;
  if (s == "-") return Spin::down;
  throw ConfigError(path, "atomic level must be \"+\" or \"-\"");
}

inline Matrix2 matrix2(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a 2x2 matrix of [re, im] entries");
  Matrix2 m;
  for (std::size_t r = 0; r < 2; ++r) {
    const std::string rp = index(path, r);
    if (!j[r].is_array() || j[r].size() != 2) throw ConfigError(rp, "expected a row of two entries");
    for (std::size_t c = 0; c < 2; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_number(j[r][c], index(rp, c));
    }
  }
  return m;
}

inline OperatorMatrix square_matrix(const Json& j, Eigen::Index d, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(d)) {
    throw ConfigError(path, "expected " + std::to_string(d) + " rows");
  }
  OperatorMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const std::string rp = index(path, static_cast<std::size_t>(r));
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(d)) {
      throw ConfigError(rp, "expected " + std::to_string(d) + " entries");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      m(r, c) = complex_number(row[static_cast<std::size_t>(c)], index(rp, static_cast<std::size_t>(c)));
    }
  }
  return m;
}

inline PolynomialOperatorSpec polynomial(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object with \"preset\" or \"terms\"");
  if (const Json* p = optional_field(j, "preset", path)) {
    reject_unknown(j, {"preset", "omega_p"}, path);
    const std::string name = string(*p, join(path, "preset"));
    double omega_p = 1.0;
    if (const Json* w = optional_field(j, "omega_p", path)) omega_p = number(*w, join(path, "omega_p"));
    try {
      return preset(name, omega_p);
    } catch (const PreconditionError& e) {
      throw ConfigError(join(path, "preset"), e.what());
    }
  }
  reject_unknown(j, {"terms"}, path);
  const std::string tp = join(path, "terms");
  const Json& terms = field(j, "terms", path);
  if (!terms.is_array()) throw ConfigError(tp, "expected an array");
  std::vector<PolynomialTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string ip = index(tp, i);
    const Json& t = terms[i];
    if (!t.is_object()) throw ConfigError(ip, "expected an object");
    reject_unknown(t, {"l", "lp", "coeff"}, ip);
    const long l = integer(field(t, "l", ip), join(ip, "l"));
    const long lp = integer(field(t, "lp", ip), join(ip, "lp"));
    if (l < 0) throw ConfigError(join(ip, "l"), "must be >= 0");
    if (lp < 0) throw ConfigError(join(ip, "lp"), "must be >= 0");
    const std::string cp = join(ip, "coeff");
    const Json& coeff = field(t, "coeff", ip);
    if (!coeff.is_array() || coeff.empty()) throw ConfigError(cp, "expected a nonempty array of {C, omega}");
    std::vector<TrigComponent> comps;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      const std::string kp = index(cp, k);
      if (!coeff[k].is_object()) throw ConfigError(kp, "expected an object");
      reject_unknown(coeff[k], {"C", "omega"}, kp);
      TrigComponent c;
      c.coeff = matrix2(field(coeff[k], "C", kp), join(kp, "C"));
      if (const Json* w = optional_field(coeff[k], "omega", kp)) c.omega = number(*w, join(kp, "omega"));
      comps.push_back(c);
    }
    out.push_back({static_cast<int>(l), static_cast<int>(lp), TrigCoefficient(std::move(comps))});
  }
  return PolynomialOperatorSpec(std::move(out));
}

inline ProbeEntry probe_entry(const Json& j, const std::string& path) {
  // "n s ; n' s'", e.g. "0+;1-"
  const std::string s = string(j, path);
  const auto semi = s.find(';');
  auto part = [&](const std::string& p) -> BasisIndex {
    if (p.size() < 2 || (p.back() != '+' && p.back() != '-')) throw ConfigError(path, "expected an entry like \"0+;1-\"");
    const std::string digits = p.substr(0, p.size() - 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError(path, "expected an entry like \"0+;1-\"");
    }
    return {std::stoi(digits), p.back() == '+' ? Spin::up : Spin::down};
  };
  if (semi == std::string::npos) throw ConfigError(path, "expected an entry like \"0+;1-\"");
  return {part(s.substr(0, semi)), part(s.substr(semi + 1))};
}

inline std::vector<std::string> string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], index(path, i)));
  return out;
}

}  // namespace detail

/// Validates and decodes a configuration document.
inline RunConfig config_from_json(const Json& root) {
  using namespace detail;
  if (!root.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(root, {"model", "initial_state", "integrator", "mode", "sweep", "check", "outputs", "seed"}, "");
  RunConfig cfg;

  // mode
  if (const Json* m = optional_field(root, "mode", "")) {
    const auto mode = mode_from_string(string(*m, "mode"));
    if (!mode) throw ConfigError("mode", "must be one of evolve, sweep, check");
    cfg.mode = *mode;
  }
  if (const Json* s = optional_field(root, "seed", "")) {
    const long seed = integer(*s, "seed");
    if (seed < 0) throw ConfigError("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  // model
  const Json& model = field(root, "model", "");
  reject_unknown(model, {"omega_c", "omega_a", "coupling", "gamma", "nu", "pump", "dissipators"}, "model");
  cfg.model.omega_c = number(field(model, "omega_c", "model"), "model.omega_c");
  cfg.model.omega_a = number(field(model, "omega_a", "model"), "model.omega_a");
  if (!(cfg.model.omega_c > 0.0)) throw ConfigError("model.omega_c", "must be > 0");
  if (!(cfg.model.omega_a > 0.0)) throw ConfigError("model.omega_a", "must be > 0");
  if (const Json* p = optional_field(model, "coupling", "model")) cfg.model.coupling = number(*p, "model.coupling");
  if (const Json* g = optional_field(model, "gamma", "model")) cfg.model.gamma = number(*g, "model.gamma");
  if (!(cfg.model.gamma >= 0.0)) throw ConfigError("model.gamma", "must be >= 0");
  const long nu = integer(field(model, "nu", "model"), "model.nu");
  if (nu < 1) throw ConfigError("model.nu", "must be >= 1");
  cfg.model.nu = TruncationLevel(static_cast<int>(nu));
  if (const Json* p = optional_field(model, "pump", "model")) cfg.model.pump = polynomial(*p, "model.pump");
  if (const Json* ds = optional_field(model, "dissipators", "model")) {
    if (!ds->is_array()) throw ConfigError("model.dissipators", "expected an array");
    for (std::size_t i = 0; i < ds->size(); ++i) {
      cfg.model.dissipators.push_back(polynomial((*ds)[i], index("model.dissipators", i)));
    }
  }

  // integrator
  const Json& in = field(root, "integrator", "");
  reject_unknown(in, {"method", "dt", "t_max", "rel_tol", "abs_tol", "record_every", "epsilon", "snapshots"},
                 "integrator");
  if (const Json* m = optional_field(in, "method", "integrator")) {
    const auto method = method_from_string(string(*m, "integrator.method"));
    if (!method) throw ConfigError("integrator.method", "must be one of rk4, rk45, unitary_exact, piecewise_const");
    cfg.integrator.method = *method;
  }
  cfg.integrator.t_max = number(field(in, "t_max", "integrator"), "integrator.t_max");
  if (!(cfg.integrator.t_max > 0.0)) throw ConfigError("integrator.t_max", "must be > 0");
  cfg.integrator.dt = default_dt(cfg.model.omega_c);
  if (const Json* x = optional_field(in, "dt", "integrator")) cfg.integrator.dt = number(*x, "integrator.dt");
  if (!(cfg.integrator.dt > 0.0)) throw ConfigError("integrator.dt", "must be > 0");
  if (cfg.integrator.t_max < cfg.integrator.dt) throw ConfigError("integrator.t_max", "must be >= integrator.dt");
  if (const Json* x = optional_field(in, "rel_tol", "integrator")) cfg.integrator.rel_tol = number(*x, "integrator.rel_tol");
  if (const Json* x = optional_field(in, "abs_tol", "integrator")) cfg.integrator.abs_tol = number(*x, "integrator.abs_tol");
  if (!(cfg.integrator.rel_tol > 0.0)) throw ConfigError("integrator.rel_tol", "must be > 0");
  if (!(cfg.integrator.abs_tol > 0.0)) throw ConfigError("integrator.abs_tol", "must be > 0");
  if (const Json* x = optional_field(in, "record_every", "integrator")) {
    const long r = integer(*x, "integrator.record_every");
    if (r < 1) throw ConfigError("integrator.record_every", "must be >= 1");
    cfg.integrator.record_every = static_cast<int>(r);
  }
  if (const Json* x = optional_field(in, "epsilon", "integrator")) cfg.integrator.epsilon = number(*x, "integrator.epsilon");
  if (!(cfg.integrator.epsilon > 0.0)) throw ConfigError("integrator.epsilon", "must be > 0");
  if (const Json* x = optional_field(in, "snapshots", "integrator")) {
    if (!x->is_boolean()) throw ConfigError("integrator.snapshots", "expected a boolean");
    cfg.integrator.keep_snapshots = x->get<bool>();
  }

  // initial state
  const Json& st = field(root, "initial_state", "");
  const std::string kind = string(field(st, "kind", "initial_state"), "initial_state.kind");
  auto& init = cfg.initial_state;
  if (kind == "fock") {
    reject_unknown(st, {"kind", "n", "s"}, "initial_state");
    init.kind = InitialState::Kind::fock;
    const long n = integer(field(st, "n", "initial_state"), "initial_state.n");
    if (n < 0 || n > cfg.model.nu.value()) throw ConfigError("initial_state.n", "must lie in [0, model.nu]");
    init.n = static_cast<int>(n);
    init.s = spin(field(st, "s", "initial_state"), "initial_state.s");
  } else if (kind == "coherent") {
    reject_unknown(st, {"kind", "alpha", "s"}, "initial_state");
    init.kind = InitialState::Kind::coherent;
    init.alpha = complex_number(field(st, "alpha", "initial_state"), "initial_state.alpha");
    init.s = spin(field(st, "s", "initial_state"), "initial_state.s");
  } else if (kind == "thermal") {
    reject_unknown(st, {"kind", "mean_n", "s"}, "initial_state");
    init.kind = InitialState::Kind::thermal;
    init.mean_n = number(field(st, "mean_n", "initial_state"), "initial_state.mean_n");
    if (!(init.mean_n >= 0.0)) throw ConfigError("initial_state.mean_n", "must be >= 0");
    init.s = spin(field(st, "s", "initial_state"), "initial_state.s");
  } else if (kind == "matrix") {
    reject_unknown(st, {"kind", "nu", "entries"}, "initial_state");
    init.kind = InitialState::Kind::matrix;
    int mnu = cfg.model.nu.value();
    if (const Json* x = optional_field(st, "nu", "initial_state")) {
      const long v = integer(*x, "initial_state.nu");
      if (v < 1) throw ConfigError("initial_state.nu", "must be >= 1");
      mnu = static_cast<int>(v);
    }
    const TruncationLevel level(mnu);
    const OperatorMatrix m = square_matrix(field(st, "entries", "initial_state"), level.dim(), "initial_state.entries");
    try {
      init.explicit_matrix.emplace(level, m);
    } catch (const Error& e) {
      throw ConfigError("initial_state.entries", e.what());
    }
  } else {
    throw ConfigError("initial_state.kind", "must be one of fock, coherent, thermal, matrix");
  }

  // sweep
  if (const Json* sw = optional_field(root, "sweep", "")) {
    reject_unknown(*sw, {"levels", "probe_entries", "probe_times", "threshold"}, "sweep");
    SweepSettings s;
    const Json& levels = field(*sw, "levels", "sweep");
    if (!levels.is_array() || levels.empty()) throw ConfigError("sweep.levels", "expected a nonempty array");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const long v = integer(levels[i], index("sweep.levels", i));
      if (v < 1) throw ConfigError(index("sweep.levels", i), "must be >= 1");
      if (!s.levels.empty() && v <= s.levels.back()) throw ConfigError(index("sweep.levels", i), "levels must be strictly increasing");
      s.levels.push_back(static_cast<int>(v));
    }
    const Json& probes = field(*sw, "probe_entries", "sweep");
    if (!probes.is_array() || probes.empty()) throw ConfigError("sweep.probe_entries", "expected a nonempty array");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const std::string ip = index("sweep.probe_entries", i);
      ProbeEntry p = probe_entry(probes[i], ip);
      if (p.row.n > s.levels.front() || p.col.n > s.levels.front()) {
        throw ConfigError(ip, "entry lies outside the smallest level");
      }
      s.probes.push_back(p);
    }
    const Json& times = field(*sw, "probe_times", "sweep");
    if (!times.is_array() || times.empty()) throw ConfigError("sweep.probe_times", "expected a nonempty array");
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = number(times[i], index("sweep.probe_times", i));
      if (t < 0.0) throw ConfigError(index("sweep.probe_times", i), "must be >= 0");
      s.probe_times.push_back(t);
    }
    if (const Json* x = optional_field(*sw, "threshold", "sweep")) s.threshold = number(*x, "sweep.threshold");
    cfg.sweep = std::move(s);
  }

  // check
  if (const Json* ch = optional_field(root, "check", "")) {
    reject_unknown(*ch, {"claims", "allow_violated", "trials"}, "check");
    CheckSettings c;
    if (const Json* x = optional_field(*ch, "claims", "check")) c.claims = string_list(*x, "check.claims");
    if (const Json* x = optional_field(*ch, "allow_violated", "check")) {
      c.allow_violated = string_list(*x, "check.allow_violated");
    }
    for (const auto* list : {&c.claims, &c.allow_violated}) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& known = known_claims();
        if (std::find(known.begin(), known.end(), (*list)[i]) == known.end()) {
          throw ConfigError(index(list == &c.claims ? "check.claims" : "check.allow_violated", i),
                            "unknown claim '" + (*list)[i] + "'");
        }
      }
    }
    if (const Json* x = optional_field(*ch, "trials", "check")) {
      c.trials = integer(*x, "check.trials");
      if (c.trials < 1) throw ConfigError("check.trials", "must be >= 1");
    }
    cfg.check = std::move(c);
  }

  if (const Json* out = optional_field(root, "outputs", "")) {
    reject_unknown(*out, {"directory"}, "outputs");
    if (const Json* d = optional_field(*out, "directory", "outputs")) cfg.output_dir = string(*d, "outputs.directory");
  }

  // The pump must be Hermitian over the simulated horizon.
  {
    const auto report =
        validate_pump_hermitian(cfg.model.pump, cfg.model.nu, uniform_sample_times(cfg.integrator.t_max));
    if (!report.ok) throw ConfigError("model.pump", report.describe());
  }
  return cfg;
}

/// Mode-specific blocks must be present for the selected mode.
inline void require_mode_block(const RunConfig& cfg) {
  if (cfg.mode == Mode::sweep && !cfg.sweep) throw ConfigError("sweep", "required when mode is sweep");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open configuration file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

inline RunConfig parse_config(const std::string& path) {
  RunConfig cfg = config_from_json(read_json_file(path));
  require_mode_block(cfg);
  return cfg;
}

}  // namespace jcsim
