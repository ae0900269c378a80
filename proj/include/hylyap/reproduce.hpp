#pragma once

// End-to-end reproduction of the built-in examples: runs the relevant checks
// and simulations, writes artifacts to a directory and compares the observed
// verdicts with the expected profile.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hylyap/io.hpp"
#include "hylyap/rng.hpp"

namespace hylyap {

struct ReproduceResult {
  io::Json observed;
  io::Json expected;
  bool matches = false;
};

std::vector<std::string> reproducible_names();

/// Runs the example and writes system.json, lyapunov.json, reports.json,
/// trajectory CSVs, level-set SVGs (where meaningful) and verdict.json into
/// dir (created if needed). Throws UsageError for unknown names.
ReproduceResult reproduce(const std::string& name, const std::filesystem::path& dir,
                          std::uint64_t seed = kDefaultSeed);

}  // namespace hylyap
