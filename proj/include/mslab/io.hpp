#pragma once

#include <string>
#include <vector>

#include "mslab/density.hpp"
#include "mslab/diagnostics.hpp"
#include "mslab/meanshift.hpp"
#include "mslab/spectral.hpp"

namespace mslab {

// CSV with one row per point and one column per coordinate; an optional
// first row that fails numeric parsing is treated as a header. ParseError
// carries the 1-based row/column; DimensionMismatch fires when rows
// disagree on column count.
ParticleEnsemble ingest_dataset(const std::string& path);

// Writes a coordinate header (x0,x1,...) then one %.17g row per point, so
// a reload reproduces the values exactly.
void save_particles_csv(const ParticleEnsemble& particles, const std::string& path);

// {grid: {dims, extents, counts}, time, values: row-major flat array}
void write_frame_json(const DensityFrame& frame, const std::string& path);
DensityFrame load_frame_json(const std::string& path);

// One JSON record per iteration: {iter, max_step, positions?}.
void write_trajectory_jsonl(const TrajectoryLog& log, const std::string& path,
                            bool include_positions = false);

// Header time,entropy,entropy_rate_analytic,var_axis0,...,mass,residual,gap;
// every value rendered with %.17g so identical series give identical bytes.
void write_diagnostics_csv(const DiagnosticSeries& series, const std::string& path);

// {t_grid, mass_clipped, max_growth, blew_up}
void write_evolution_json(const EvolutionReport& report, const std::string& path);

// Lowercase hex SHA-256 of the file's bytes.
std::string sha256_file(const std::string& path);

std::string format_double(double v); // %.17g

} // namespace mslab
