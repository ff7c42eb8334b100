// herald-sim: heralded spin-oscillator control simulator.
//
//   herald-sim run   --config <path> [--out <dir>] [--seed <u64>] [--quiet]
//   herald-sim sweep --config <path> [--out <dir>] [--quiet]
//
// Exit codes: 0 ok, 2 config error, 3 numeric error, 4 truncation error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "heraldsim/config.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw heraldsim::ConfigError("cannot read config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int execute(const std::string& config_path, const std::string& out_override,
            bool has_seed, std::uint64_t seed, bool quiet, bool sweep_only) {
  heraldsim::RunConfig cfg = heraldsim::parse_config(read_file(config_path));
  if (has_seed) {
    cfg.seed = seed;
    cfg.has_seed = true;
  }
  if (sweep_only && cfg.sweep.empty())
    throw heraldsim::ConfigError("sweep subcommand requires a \"sweep\" section");

  const std::string out_dir = out_override.empty() ? cfg.output_dir : out_override;
  const auto results =
      heraldsim::run_config(cfg, out_dir, heraldsim::default_thread_cap(), quiet);
  if (!quiet)
    std::cout << "wrote " << results.size() << (results.size() == 1 ? " run to " : " points to ")
              << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heralded spin-oscillator control simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "execute a single config (plus its sweep, if any)");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "seed override");
  run->add_flag("--quiet", quiet, "suppress warnings and progress");

  CLI::App* sweep = app.add_subcommand("sweep", "execute the config's sweep grid");
  sweep->add_option("--config", config_path, "JSON config path")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides config)");
  sweep->add_flag("--quiet", quiet, "suppress warnings and progress");

  CLI11_PARSE(app, argc, argv);

  try {
    const bool is_sweep = sweep->parsed();
    return execute(config_path, out_dir, seed_opt->count() > 0, seed, quiet, is_sweep);
  } catch (const heraldsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const heraldsim::TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << '\n';
    return 4;
  } catch (const heraldsim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
