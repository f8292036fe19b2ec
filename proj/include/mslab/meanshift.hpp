#pragma once

#include <cstddef>
#include <vector>

#include "mslab/density.hpp"

namespace mslab {

struct MeanShiftConfig {
    KernelSpec kernel;
    double a2 = 1.0;
    double ball_d = 0.2;
    std::size_t max_iter = 200;
    double eps = 1e-6;
    double merge_tol = 0.1;

    void validate() const;
};

// Per-iteration ensemble snapshots of a particle run; timestamps carry the
// physical time for advection runs and the iteration index for blurring runs.
struct TrajectoryLog {
    std::vector<ParticleEnsemble> snapshots;
    std::vector<double> max_step;   // one entry per update
    std::vector<double> timestamps; // one entry per snapshot
    bool converged = false;
};

// Kernel-weighted sample mean: sum K(x,s) w(s) s / sum K(x,s) w(s).
// Throws EmptyKernelSupport when the denominator vanishes.
std::vector<double> generalized_meanshift_map(const std::vector<double>& x,
                                              const ParticleEnsemble& samples,
                                              const KernelSpec& kernel);

// Conditional mean of the density over the ball B(x,d): grid nodes whose
// center lies within d are included with uniform h^n weights (no partial
// cells). Throws EmptyKernelSupport when the ball mass quadratures to 0.
std::vector<double> ball_conditional_mean_step(const std::vector<double>& x,
                                               const DensityFrame& frame, double d);

// Second-order prediction of the ball step: x + (n d^2/(n+2)) grad f / f,
// with f and grad f read at the grid node nearest to x.
// Throws ZeroDensity below the 1e-12-of-peak positivity floor.
std::vector<double> gradient_step_prediction(const std::vector<double>& x,
                                             const DensityFrame& frame, double d);

// u = a^2 grad f / f per node; nodes with f below 1e-12 of the peak are
// masked (valid=false, components 0).
struct VelocityField {
    std::vector<std::vector<double>> components; // per axis
    std::vector<char> valid;                     // per node
};
VelocityField velocity_field(const DensityFrame& frame, double a2);

// Simultaneous ("blurring") mean shift: every point moves against the
// current ensemble each iteration until max step < eps or the budget runs
// out (non-convergence is recorded, not thrown).
TrajectoryLog run_blurring_meanshift(const ParticleEnsemble& particles,
                                     const MeanShiftConfig& config);

struct Mode {
    std::vector<double> point;
    std::size_t count = 0;
};

// Single-linkage clustering of the final snapshot at merge_tol; returns
// member centroids and counts (counts sum to N).
std::vector<Mode> detect_modes(const TrajectoryLog& log, double merge_tol);

// Euler advection of particles through the velocity fields of a frame
// sequence (velocities interpolated multilinearly, zero outside the grid);
// snapshot k is stamped at frames[k].time().
TrajectoryLog advect_with_velocity_field(const ParticleEnsemble& particles,
                                         const std::vector<DensityFrame>& frames,
                                         double a2);

} // namespace mslab
