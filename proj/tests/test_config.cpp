#include <gtest/gtest.h>

#include "jcsim/run.hpp"

using namespace jcsim;

namespace {

Json minimal() {
  return Json::parse(R"({
    "model": {"omega_c": 1.0, "omega_a": 1.0, "gamma": 0.5, "nu": 3,
              "dissipators": [{"preset": "photon_loss_D1"}]},
    "initial_state": {"kind": "fock", "n": 0, "s": "+"},
    "integrator": {"method": "rk4", "dt": 0.01, "t_max": 0.5}
  })");
}

std::string error_path(const Json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(CanonicalDump, SortedKeysComplexPairsAndPrecision) {
  const Json j = {{"b", 0.1}, {"a", Json::array({1.0, -2.5})}, {"c", {{"z", 1}, {"y", true}}}};
  const std::string s = canonical_dump(j);
  EXPECT_EQ(s,
            "{\n  \"a\": [1,-2.5],\n  \"b\": 0.10000000000000001,\n  \"c\": {\n    \"y\": true,\n    \"z\": 1\n  }\n}\n");
  EXPECT_THROW(canonical_dump(Json(std::nan(""))), Error);
}

TEST(Config, MinimalParsesAndRoundTrips) {
  const RunConfig cfg = config_from_json(minimal());
  EXPECT_EQ(cfg.model.nu.value(), 3);
  EXPECT_EQ(cfg.mode, Mode::evolve);
  const std::string once = canonical_dump(to_json(cfg));
  const std::string twice = canonical_dump(to_json(config_from_json(Json::parse(once))));
  EXPECT_EQ(once, twice);
}

TEST(Config, DefaultDtFollowsCavityFrequency) {
  Json j = minimal();
  j["integrator"].erase("dt");
  j["model"]["omega_c"] = 2.0;
  EXPECT_DOUBLE_EQ(config_from_json(j).integrator.dt, default_dt(2.0));
}

TEST(Config, NonHermitianPumpRejected) {
  Json j = minimal();
  j["model"]["coupling"] = 0.1;
  j["model"]["pump"] = Json::parse(R"({"terms": [{"l": 0, "lp": 0, "coeff": [{"C": [[[0,0],[1,0]],[[0,0],[0,0]]]}]}]})");
  try {
    config_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "model.pump");
    EXPECT_NE(std::string(e.what()).find("not Hermitian"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("max defect"), std::string::npos);
  }
}

TEST(Config, ErrorPathsNameTheField) {
  Json j = minimal();
  j["integrator"]["method"] = "leapfrog";
  EXPECT_EQ(error_path(j), "integrator.method");

  j = minimal();
  j["model"]["dissipators"][0]["preset"] = "photon_gain";
  EXPECT_EQ(error_path(j), "model.dissipators[0].preset");

  j = minimal();
  j["model"]["colour"] = "red";
  EXPECT_EQ(error_path(j), "model.colour");

  j = minimal();
  j.erase("model");
  EXPECT_EQ(error_path(j), "model");

  j = minimal();
  j["model"]["nu"] = 0;
  EXPECT_EQ(error_path(j), "model.nu");

  j = minimal();
  j["initial_state"]["n"] = 9;
  EXPECT_EQ(error_path(j), "initial_state.n");

  j = minimal();
  j["initial_state"]["s"] = "x";
  EXPECT_EQ(error_path(j), "initial_state.s");

  j = minimal();
  j["integrator"]["dt"] = "small";
  EXPECT_EQ(error_path(j), "integrator.dt");

  j = minimal();
  j["check"] = {{"claims", {"k_orthogonality", "no_such_claim"}}};
  EXPECT_EQ(error_path(j), "check.claims[1]");

  j = minimal();
  j["sweep"] = Json::parse(R"({"levels": [2, 4], "probe_entries": ["0+;9-"], "probe_times": [0.1]})");
  EXPECT_EQ(error_path(j), "sweep.probe_entries[0]");

  j = minimal();
  j["sweep"] = Json::parse(R"({"levels": [4, 2], "probe_entries": ["0+;0+"], "probe_times": [0.1]})");
  EXPECT_EQ(error_path(j), "sweep.levels[1]");

  j = minimal();
  j["model"]["pump"] = Json::parse(R"({"terms": [{"l": 0, "lp": -1, "coeff": [{"C": [[[1,0],[0,0]],[[0,0],[1,0]]]}]}]})");
  EXPECT_EQ(error_path(j), "model.pump.terms[0].lp");
}

TEST(Config, SweepModeNeedsSweepBlock) {
  Json j = minimal();
  j["mode"] = "sweep";
  const RunConfig cfg = config_from_json(j);
  EXPECT_THROW(require_mode_block(cfg), ConfigError);
}

TEST(Config, ProbeEntriesAndExplicitMatrix) {
  Json j = minimal();
  j["sweep"] = Json::parse(R"({"levels": [2, 4], "probe_entries": ["0+;1-", "2-;2-"], "probe_times": [0.1]})");
  j["initial_state"] = Json::parse(R"({"kind": "matrix", "nu": 1, "entries":
      [[[0.5,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0.5,0],[0,0]], [[0,0],[0,0],[0,0],[0,0]]]})");
  const RunConfig cfg = config_from_json(j);
  ASSERT_EQ(cfg.sweep->probes.size(), 2u);
  EXPECT_EQ(cfg.sweep->probes[0].label(), "0+;1-");
  EXPECT_EQ(cfg.sweep->probes[1].label(), "2-;2-");
  const DensityMatrix rho = cfg.initial_state.build(TruncationLevel(3));
  EXPECT_EQ(rho.dim(), 8);
  EXPECT_EQ(rho(BasisIndex{1, Spin::up}, BasisIndex{1, Spin::up}), Complex(0.5));
  const std::string once = canonical_dump(to_json(cfg));
  EXPECT_EQ(once, canonical_dump(to_json(config_from_json(Json::parse(once)))));

  j["sweep"]["probe_entries"] = {"0+1-"};
  EXPECT_EQ(error_path(j), "sweep.probe_entries[0]");
}

TEST(Config, MalformedJsonFile) {
  const auto path = std::filesystem::temp_directory_path() / "jcsim_malformed.json";
  std::ofstream(path) << "{ \"model\": ";
  EXPECT_THROW(parse_config(path.string()), ConfigError);
  EXPECT_THROW(parse_config((path.string() + ".missing")), ConfigError);
}

TEST(Run, EvolveCsvHeaderAndRows) {
  Json j = minimal();
  j["integrator"]["record_every"] = 7;  // 50 steps
  const RunResult r = execute(config_from_json(j), {true});
  const auto rows = lines(r.files.at("observables.csv"));
  EXPECT_EQ(rows[0], "t,trace_re,trace_im,hs_norm,purity,min_eig,inversion,photon_number");
  EXPECT_EQ(rows.size(), 1u + 9u);  // t = 0, 7 records at multiples of 7 steps, t_max
  EXPECT_EQ(r.files.count("summary.json"), 1u);
  EXPECT_EQ(r.files.count("snapshots.json"), 0u);
}

TEST(Run, StationaryEvolveRowsIdentical) {
  Json j = minimal();
  j["model"]["gamma"] = 0.0;
  j["model"]["coupling"] = 0.0;
  const RunResult r = execute(config_from_json(j), {true});
  const auto rows = lines(r.files.at("observables.csv"));
  ASSERT_GT(rows.size(), 3u);
  const std::string first = rows[1].substr(rows[1].find(','));
  for (std::size_t k = 2; k < rows.size(); ++k) EXPECT_EQ(rows[k].substr(rows[k].find(',')), first);
}

TEST(Run, SnapshotsWritten) {
  Json j = minimal();
  j["integrator"]["snapshots"] = true;
  j["integrator"]["record_every"] = 25;
  const RunResult r = execute(config_from_json(j), {true});
  const Json snaps = Json::parse(r.files.at("snapshots.json"));
  EXPECT_EQ(snaps["nu"], 3);
  EXPECT_EQ(snaps["snapshots"].size(), 3u);
  EXPECT_EQ(snaps["snapshots"][0]["rho"].size(), 8u);
}

TEST(Run, SweepOutputs) {
  Json j = minimal();
  j["mode"] = "sweep";
  j["sweep"] = Json::parse(R"({"levels": [2, 4, 6], "probe_entries": ["0+;0+"], "probe_times": [0.25, 0.5]})");
  j["initial_state"] = Json::parse(R"({"kind": "coherent", "alpha": [0.5, 0.0], "s": "+"})");
  const RunResult r = execute(config_from_json(j), {true});
  const auto rows = lines(r.files.at("convergence.csv"));
  EXPECT_EQ(rows[0], "entry,t,nu,re,im,diff_to_next");
  EXPECT_EQ(rows.size(), 1u + 2u * 3u);
  EXPECT_EQ(rows[3].substr(0, 12), "0+;0+,0.25,6");
  EXPECT_EQ(rows[3].back(), ',');  // last level has no successor
  EXPECT_TRUE(Json::parse(r.files.at("sweep_summary.json"))["verdict_is_heuristic"].get<bool>());
}

TEST(Run, CheckModeDefaultsExitZeroWithAllowListedWitness) {
  Json j = minimal();
  j["mode"] = "check";
  j["check"] = Json::object();
  j["model"]["nu"] = 6;
  const RunConfig cfg = config_from_json(j);
  const RunResult r = execute(cfg, {true});
  EXPECT_EQ(r.exit_code, 0);
  const Json report = Json::parse(r.files.at("claims.json"));
  EXPECT_TRUE(report["all_asserted_hold"].get<bool>());
  bool found = false;
  for (const auto& c : report["claims"]) {
    if (c["claim"] == "dissipator_sign_raw") {
      found = true;
      EXPECT_EQ(c["verdict"], "violated");
      EXPECT_TRUE(c["allow_listed"].get<bool>());
      EXPECT_NEAR(c["witness"]["value"].get<double>(), 2.0, 1e-12);
      EXPECT_EQ(c["witness"]["rho"][0][0], Json::parse("[2.0, 0.0]"));
    } else {
      EXPECT_EQ(c["verdict"], "holds_within_tol") << c["claim"];
      EXPECT_FALSE(c.contains("witness"));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Run, CheckModeFailsWhenViolationNotAllowListed) {
  Json j = minimal();
  j["mode"] = "check";
  j["check"] = {{"claims", {"dissipator_sign_raw"}}, {"allow_violated", Json::array()}, {"trials", 10}};
  EXPECT_EQ(execute(config_from_json(j), {true}).exit_code, 1);
}

TEST(Run, ByteIdenticalAcrossRuns) {
  Json j = minimal();
  j["mode"] = "check";
  j["check"] = {{"trials", 50}};
  j["seed"] = 99;
  const RunConfig cfg = config_from_json(j);
  EXPECT_EQ(execute(cfg, {true}).files, execute(cfg, {true}).files);
  RunConfig other = cfg;
  other.seed = 100;
  EXPECT_NE(execute(cfg, {true}).files, execute(other, {true}).files);
}

TEST(ErrorJson, CarriesKindAndPath) {
  const Json j = error_json(ConfigError("integrator.method", "bad"));
  EXPECT_EQ(j["error"]["path"], "integrator.method");
  EXPECT_EQ(j["error"]["kind"], "config");
  const Json k = error_json(IntegrationError("boom", 1.5));
  EXPECT_EQ(k["error"]["t_reached"], 1.5);
}
