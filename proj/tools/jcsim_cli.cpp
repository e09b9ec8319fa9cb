// jcsim: integrate, sweep or check the truncated damped driven
// Jaynes-Cummings master equation from a JSON configuration.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "jcsim/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Truncated damped driven Jaynes-Cummings simulator"};
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--output-dir", output_dir, "directory for output files (overrides outputs.directory)");
  app.add_option("--mode", mode, "override the configured mode")->check(CLI::IsMember({"evolve", "sweep", "check"}));
  app.add_option("--seed", seed, "override the configured seed");
  app.add_flag("--quiet", quiet, "suppress progress notes on stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    jcsim::RunConfig cfg = jcsim::parse_config(config_path);
    if (mode) cfg.mode = *jcsim::mode_from_string(*mode);
    if (seed) cfg.seed = *seed;
    if (output_dir) cfg.output_dir = *output_dir;
    jcsim::require_mode_block(cfg);

    const jcsim::RunResult result = jcsim::execute(cfg, {quiet});
    jcsim::write_outputs(result, cfg.output_dir);
    return result.exit_code;
  } catch (const jcsim::Error& e) {
    std::cerr << jcsim::canonical_dump(jcsim::error_json(e));
    return 2;
  } catch (const std::exception& e) {
    std::cerr << jcsim::canonical_dump(jcsim::Json{{"error", {{"kind", "internal"}, {"message", e.what()}}}});
    return 3;
  }
}
