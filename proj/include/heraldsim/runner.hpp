#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "heraldsim/config.hpp"

namespace heraldsim {

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> warnings;
};

// Execute one config point: writes summary.json, rounds.csv, and (for the
// P-function engine) pgrid.csv / (for engine=both) compare.csv into out_dir.
// `threads` caps the trajectory-ensemble pool; outputs are byte-identical
// for any thread count.
RunResult run_single(const RunConfig& cfg, const std::filesystem::path& out_dir,
                     int threads = 0);

// Execute the config with its sweep expansion; points run concurrently up to
// `threads` workers (sweep points write disjoint point_NNN directories, so
// output bytes do not depend on the thread count).
std::vector<RunResult> run_config(const RunConfig& cfg,
                                  const std::filesystem::path& out_dir, int threads,
                                  bool quiet);

// Thread cap: HERALD_SIM_THREADS, else hardware concurrency.
int default_thread_cap();

}  // namespace heraldsim
