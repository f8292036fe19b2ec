#pragma once

#include "mslab/config.hpp"
#include "mslab/manifest.hpp"

namespace mslab {

// Executes the named pipeline, writes diagnostics.csv, frames/*.json,
// trajectory.jsonl (and evolution.json for propagation runs) into
// config.out_dir, then hashes everything into manifest.json. Module
// errors surface as ExperimentError; ConfigError and IoError pass through.
RunManifest run_experiment(const ExperimentConfig& config);

} // namespace mslab
