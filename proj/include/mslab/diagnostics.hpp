#pragma once

#include <vector>

#include "mslab/density.hpp"
#include "mslab/meanshift.hpp"

namespace mslab {

// Shared-time-axis channel bundle written to diagnostics.csv. Channels a
// pipeline does not produce stay 0 for every stamp.
struct DiagnosticSeries {
    std::vector<double> time;
    std::vector<double> entropy;
    std::vector<double> entropy_rate; // analytic -a2 int f'^2/f
    std::vector<std::vector<double>> variance; // [axis][stamp]
    std::vector<double> mass;
    std::vector<double> residual; // conservation residual sup-norm
    std::vector<double> gap;      // particle-vs-frame sup-norm

    std::size_t stamps() const { return time.size(); }
};

// Differential entropy -int f ln f by grid quadrature; nodes below 1e-300
// are skipped (0 ln 0 := 0).
double entropy(const DensityFrame& frame);

// Analytic entropy rate -a2 int |grad f|^2 / f; nodes with f below 1e-12
// of the peak are skipped. Strictly negative for non-constant frames.
double entropy_rate_analytic(const DensityFrame& frame, double a2);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Ordinary least squares y against x.
LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

// Per-axis second central moments of one frame (normalized by its mass).
std::vector<double> frame_variance(const DensityFrame& frame);

// Per-axis second central moments of each frame plus the OLS slope of each
// axis's variance against time.
struct VarianceTrace {
    std::vector<double> time;
    std::vector<std::vector<double>> variance; // [axis][stamp]
    std::vector<LineFit> fit;                  // per axis
};
VarianceTrace variance_trace(const std::vector<DensityFrame>& frames);

// Discrete conservation-law residual (f2 - f1)/delta + div(u f1), central
// differences; masked velocity nodes contribute u = 0.
struct ConservationResidual {
    std::vector<double> field;
    double sup_norm = 0.0;
};
ConservationResidual conservation_residual(const DensityFrame& frame_t,
                                           const DensityFrame& frame_t_plus,
                                           const VelocityField& velocity, double delta);

// Per-stamp sup-norm between the KDE of each trajectory snapshot and the
// matching frame. Stamp counts must agree and timestamps must align within
// half the frame spacing (TimeMisalignment otherwise).
std::vector<double> particle_pde_gap(const TrajectoryLog& log,
                                     const std::vector<DensityFrame>& frames,
                                     const KernelSpec& kernel);

// Local maxima of a 1-D frame (plateaus collapse to their median node) with
// the quadrature mass of each basin; basin boundaries sit at the median
// node of the minimal plateau between consecutive modes. Maxima below
// min_relative_height of the peak are ignored.
struct FrameMode {
    double position = 0.0;
    double mass = 0.0;
};
std::vector<FrameMode> frame_modes(const DensityFrame& frame,
                                   double min_relative_height = 1e-9);

} // namespace mslab
