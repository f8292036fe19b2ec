#include "mslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mslab/errors.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

namespace {

double frame_peak(const DensityFrame& frame) {
    double peak = 0.0;
    for (double v : frame.values()) peak = std::max(peak, v);
    return peak;
}

} // namespace

double entropy(const DensityFrame& frame) {
    const DomainGrid& g = frame.grid();
    return deterministic_sum(frame.size(), [&](std::size_t i) {
        const double f = frame.value(i);
        if (f < 1e-300) return 0.0;
        std::size_t idx[8];
        g.unravel(i, idx);
        return -g.node_weight(idx) * f * std::log(f);
    });
}

double entropy_rate_analytic(const DensityFrame& frame, double a2) {
    const DomainGrid& g = frame.grid();
    const double floor = 1e-12 * frame_peak(frame);
    const auto grad = density_gradient(frame);
    return deterministic_sum(frame.size(), [&](std::size_t i) {
        const double f = frame.value(i);
        if (f < floor || f <= 0.0) return 0.0;
        double g2 = 0.0;
        for (const auto& comp : grad) g2 += comp[i] * comp[i];
        std::size_t idx[8];
        g.unravel(i, idx);
        return -a2 * g.node_weight(idx) * g2 / f;
    });
}

LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols: need two or more matched samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols: degenerate abscissa");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.slope * x[i] - fit.intercept;
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

std::vector<double> frame_variance(const DensityFrame& frame) {
    const DomainGrid& g = frame.grid();
    const double mass = frame.mass();
    std::vector<double> var(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const double mean = deterministic_sum(frame.size(), [&](std::size_t i) {
            std::size_t idx[8];
            g.unravel(i, idx);
            return g.node_weight(idx) * g.coord(a, idx[a]) * frame.value(i);
        }) / mass;
        var[a] = deterministic_sum(frame.size(), [&](std::size_t i) {
            std::size_t idx[8];
            g.unravel(i, idx);
            const double d = g.coord(a, idx[a]) - mean;
            return g.node_weight(idx) * d * d * frame.value(i);
        }) / mass;
    }
    return var;
}

VarianceTrace variance_trace(const std::vector<DensityFrame>& frames) {
    if (frames.size() < 2)
        throw std::invalid_argument("variance trace: need two or more frames");
    const DomainGrid& g = frames.front().grid();
    VarianceTrace trace;
    trace.variance.assign(g.dim(), {});
    for (const DensityFrame& frame : frames) {
        if (!frame.grid().same_as(g))
            throw std::invalid_argument("variance trace: frames on mismatched grids");
        trace.time.push_back(frame.time());
        const std::vector<double> var = frame_variance(frame);
        for (std::size_t a = 0; a < g.dim(); ++a) trace.variance[a].push_back(var[a]);
    }
    for (std::size_t a = 0; a < g.dim(); ++a)
        trace.fit.push_back(ols_fit(trace.time, trace.variance[a]));
    return trace;
}

ConservationResidual conservation_residual(const DensityFrame& frame_t,
                                           const DensityFrame& frame_t_plus,
                                           const VelocityField& velocity, double delta) {
    const DomainGrid& g = frame_t.grid();
    if (!frame_t_plus.grid().same_as(g))
        throw std::invalid_argument("residual: frames on mismatched grids");
    if (!(delta > 0.0)) throw std::invalid_argument("residual: delta must be positive");
    if (velocity.components.size() != g.dim() || velocity.valid.size() != g.nodes())
        throw std::invalid_argument("residual: velocity field does not match grid");

    ConservationResidual out;
    out.field.resize(g.nodes());
    for (std::size_t i = 0; i < g.nodes(); ++i)
        out.field[i] = (frame_t_plus.value(i) - frame_t.value(i)) / delta;
    std::vector<double> flux(g.nodes());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < g.nodes(); ++i)
            flux[i] = velocity.valid[i] ? velocity.components[a][i] * frame_t.value(i) : 0.0;
        const std::vector<double> div = grid_derivative(g, flux, a);
        for (std::size_t i = 0; i < g.nodes(); ++i) out.field[i] += div[i];
    }
    for (double v : out.field) out.sup_norm = std::max(out.sup_norm, std::abs(v));
    return out;
}

std::vector<double> particle_pde_gap(const TrajectoryLog& log,
                                     const std::vector<DensityFrame>& frames,
                                     const KernelSpec& kernel) {
    if (log.snapshots.size() != frames.size() || log.timestamps.size() != frames.size())
        throw TimeMisalignment("gap: snapshot and frame counts differ");
    if (frames.empty()) return {};
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < frames.size(); ++k)
        spacing = std::min(spacing, std::abs(frames[k].time() - frames[k - 1].time()));
    if (frames.size() == 1) spacing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < frames.size(); ++k)
        if (std::abs(log.timestamps[k] - frames[k].time()) > 0.5 * spacing)
            throw TimeMisalignment("gap: stamps differ by more than half a frame step");

    std::vector<double> gap(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const DensityFrame kde =
            kde_estimate(log.snapshots[k], kernel, frames[k].grid(), frames[k].time());
        double sup = 0.0;
        for (std::size_t i = 0; i < kde.size(); ++i)
            sup = std::max(sup, std::abs(kde.value(i) - frames[k].value(i)));
        gap[k] = sup;
    }
    return gap;
}

std::vector<FrameMode> frame_modes(const DensityFrame& frame, double min_relative_height) {
    const DomainGrid& g = frame.grid();
    if (g.dim() != 1)
        throw std::invalid_argument("frame modes: 1-D frames only");
    const std::vector<double>& f = frame.values();
    const std::size_t n = f.size();
    const double floor = min_relative_height * frame_peak(frame);

    // Collapse equal-value plateaus to their median node, then classify.
    std::vector<std::size_t> maxima;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && f[j + 1] == f[i]) ++j;
        const bool left_rises = i > 0 && f[i - 1] < f[i];
        const bool right_falls = j + 1 < n && f[j + 1] < f[i];
        const bool interior_max = left_rises && right_falls;
        if (interior_max && f[i] >= floor) maxima.push_back((i + j) / 2);
        i = j + 1;
    }

    std::vector<FrameMode> modes;
    if (maxima.empty()) return modes;

    // Basin boundary between consecutive maxima: median node of the minimal
    // plateau separating them; each basin's mass uses the node weights.
    std::vector<std::size_t> cuts; // first node of each basin after the first
    for (std::size_t m = 1; m < maxima.size(); ++m) {
        std::size_t lo = maxima[m - 1], hi = maxima[m];
        std::size_t arg = lo;
        for (std::size_t k = lo; k <= hi; ++k)
            if (f[k] < f[arg]) arg = k;
        std::size_t l = arg, r = arg;
        while (l > lo && f[l - 1] == f[arg]) --l;
        while (r < hi && f[r + 1] == f[arg]) ++r;
        cuts.push_back((l + r) / 2 + 1);
    }

    std::size_t start = 0;
    for (std::size_t m = 0; m < maxima.size(); ++m) {
        const std::size_t stop = m + 1 < maxima.size() ? cuts[m] : n;
        FrameMode mode;
        mode.position = g.coord(0, maxima[m]);
        double mass = 0.0;
        for (std::size_t k = start; k < stop; ++k) mass += g.axis_weight(0, k) * f[k];
        mode.mass = mass;
        modes.push_back(mode);
        start = stop;
    }
    return modes;
}

} // namespace mslab
