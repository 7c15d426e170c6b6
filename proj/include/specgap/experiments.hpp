#pragma once

#include <functional>
#include <string>

#include "specgap/io.hpp"

namespace specgap {

// Batch front door: runs one experiment described by a parsed config and
// writes CSV/JSON artifacts plus a manifest into the output directory.
// Returns the process exit code (0 ok, 2 validation, 3 solver failure).
int run_experiment(const Config& cfg, const std::string& out_dir, int jobs);

// Parallel map over [0, n) with at most `jobs` workers; results are produced
// into caller-indexed slots so aggregation order is deterministic.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

} // namespace specgap
