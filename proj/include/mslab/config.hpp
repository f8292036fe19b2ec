#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mslab/density.hpp"
#include "mslab/meanshift.hpp"
#include "mslab/spectral.hpp"
#include "mslab/supervision.hpp"

namespace mslab {

// One JSON file per run; every field has a per-experiment default and the
// fully materialized form is echoed into the manifest. Any parse or
// validation problem throws ConfigError.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 42;
    DomainGrid grid;
    EvolutionSpec evolution;
    MeanShiftConfig meanshift;
    SinkFunction sink;
    GaussianMixtureModel initial;
    double ripple_frequency = 8.0; // instability-demo perturbation
    double ripple_amplitude = 0.1;
    std::string out_dir = "out";
    std::optional<std::string> dataset;
    std::size_t n_particles = 400;
    std::size_t gap_stride = 10;  // stamps between particle-gap samples
    std::size_t tau_nodes = 64;
    bool log_positions = false;
    bool deterministic = false;

    void validate() const;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& list_experiments();

// Fully materialized defaults for one experiment name.
ExperimentConfig default_config(const std::string& experiment);

// Defaults for the named experiment overlaid with the user's fields.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

} // namespace mslab
