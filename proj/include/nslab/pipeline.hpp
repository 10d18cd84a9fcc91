#pragma once

#include "nslab/config.hpp"
#include "nslab/reports.hpp"

namespace nslab {

// Executes the pipeline selected by cfg.mode, writes all artifacts and the
// manifest under cfg.out_dir, and returns the manifest. Exit status 0 iff
// every selected audit passed.
RunManifest run_pipeline(const RunConfig& cfg);

// Cross product of the sweep axes; each point runs in its own
// subdirectory, aggregation is a deterministic reduce over sorted keys.
RunManifest run_sweep(const RunConfig& cfg);

}  // namespace nslab
