#include "mslab/meanshift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mslab/errors.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

namespace {

double kernel_value(const KernelSpec& kernel, double r2) {
    if (kernel.kind == KernelKind::gaussian)
        return std::exp(-r2 / (2.0 * kernel.bandwidth * kernel.bandwidth));
    return r2 <= kernel.bandwidth * kernel.bandwidth ? 1.0 : 0.0;
}

std::size_t nearest_node(const DomainGrid& grid, std::size_t axis, double x) {
    const double h = grid.spacing(axis);
    double pos = (x - grid.lo(axis)) / h;
    long i = std::lround(pos);
    i = std::clamp<long>(i, 0, static_cast<long>(grid.count(axis)) - 1);
    return static_cast<std::size_t>(i);
}

} // namespace

void MeanShiftConfig::validate() const {
    if (!(a2 > 0.0) || !(ball_d > 0.0) || !(eps > 0.0) || !(merge_tol >= 0.0))
        throw std::invalid_argument("meanshift config: nonpositive parameter");
    if (max_iter == 0) throw std::invalid_argument("meanshift config: max_iter must be >= 1");
}

std::vector<double> generalized_meanshift_map(const std::vector<double>& x,
                                              const ParticleEnsemble& samples,
                                              const KernelSpec& kernel) {
    const std::size_t d = samples.dim;
    if (x.size() != d) throw std::invalid_argument("meanshift map: dimension mismatch");
    kernel.validate(samples.size());
    std::vector<double> num(d, 0.0);
    double den = 0.0;
    for (std::size_t p = 0; p < samples.size(); ++p) {
        const double* s = samples.point(p);
        double r2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double dxa = x[a] - s[a];
            r2 += dxa * dxa;
        }
        const double w = kernel.weights.empty() ? 1.0 : kernel.weights[p];
        const double k = kernel_value(kernel, r2) * w;
        den += k;
        for (std::size_t a = 0; a < d; ++a) num[a] += k * s[a];
    }
    if (den <= 0.0) throw EmptyKernelSupport("mean-shift kernel support is empty");
    for (double& v : num) v /= den;
    return num;
}

std::vector<double> ball_conditional_mean_step(const std::vector<double>& x,
                                               const DensityFrame& frame, double d) {
    const DomainGrid& g = frame.grid();
    if (x.size() != g.dim()) throw std::invalid_argument("ball step: dimension mismatch");
    if (!(d > 0.0)) throw std::invalid_argument("ball step: radius must be positive");
    // uniform product-h weight per included node; the inclusion test gets a
    // relative slack so node-aligned ball endpoints are kept despite round-off
    double cell = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a) cell *= g.spacing(a);
    const double d2 = d * d * (1.0 + 1e-9);
    const std::vector<double>& f = frame.values();
    std::vector<double> num(g.dim(), 0.0);
    double den = 0.0;
    std::size_t idx[8];
    std::vector<double> node(g.dim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        g.unravel(i, idx);
        double r2 = 0.0;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            node[a] = g.coord(a, idx[a]);
            const double dxa = node[a] - x[a];
            r2 += dxa * dxa;
        }
        if (r2 > d2) continue;
        const double w = f[i] * cell;
        den += w;
        for (std::size_t a = 0; a < g.dim(); ++a) num[a] += w * node[a];
    }
    if (den <= 0.0) throw EmptyKernelSupport("ball mass quadratures to zero");
    for (double& v : num) v /= den;
    return num;
}

std::vector<double> gradient_step_prediction(const std::vector<double>& x,
                                             const DensityFrame& frame, double d) {
    const DomainGrid& g = frame.grid();
    const std::size_t n = g.dim();
    if (x.size() != n) throw std::invalid_argument("prediction: dimension mismatch");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < n; ++a)
        flat = flat * g.count(a) + nearest_node(g, a, x[a]);
    double peak = 0.0;
    for (double v : frame.values()) peak = std::max(peak, v);
    const double fx = frame.value(flat);
    if (fx < 1e-12 * peak) throw ZeroDensity("density underflows the positivity floor");
    const auto grad = density_gradient(frame);
    const double coef = static_cast<double>(n) * d * d / (static_cast<double>(n) + 2.0);
    std::vector<double> out(x);
    for (std::size_t a = 0; a < n; ++a) out[a] += coef * grad[a][flat] / fx;
    return out;
}

VelocityField velocity_field(const DensityFrame& frame, double a2) {
    const auto grad = density_gradient(frame);
    const std::vector<double>& f = frame.values();
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, v);
    const double floor = 1e-12 * peak;
    VelocityField out;
    out.components.assign(frame.grid().dim(), std::vector<double>(f.size(), 0.0));
    out.valid.assign(f.size(), 0);
    parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            if (f[i] <= floor) continue;
            out.valid[i] = 1;
            for (std::size_t a = 0; a < out.components.size(); ++a)
                out.components[a][i] = a2 * grad[a][i] / f[i];
        }
    });
    return out;
}

TrajectoryLog run_blurring_meanshift(const ParticleEnsemble& particles,
                                     const MeanShiftConfig& config) {
    config.validate();
    if (particles.size() == 0) throw std::invalid_argument("blurring run: empty ensemble");
    TrajectoryLog log;
    log.snapshots.push_back(particles);
    log.timestamps.push_back(0.0);
    ParticleEnsemble current = particles;
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        ParticleEnsemble next = current;
        std::vector<double> step2(current.size(), 0.0);
        parallel_for(current.size(), [&](std::size_t lo, std::size_t hi) {
            std::vector<double> x(current.dim);
            for (std::size_t p = lo; p < hi; ++p) {
                x.assign(current.point(p), current.point(p) + current.dim);
                const auto y = generalized_meanshift_map(x, current, config.kernel);
                double s2 = 0.0;
                for (std::size_t a = 0; a < current.dim; ++a) {
                    const double da = y[a] - x[a];
                    s2 += da * da;
                    next.point(p)[a] = y[a];
                }
                step2[p] = s2;
            }
        });
        double max2 = 0.0;
        for (double s : step2) max2 = std::max(max2, s);
        const double max_step = std::sqrt(max2);
        current = std::move(next);
        log.snapshots.push_back(current);
        log.timestamps.push_back(static_cast<double>(it));
        log.max_step.push_back(max_step);
        if (max_step < config.eps) {
            log.converged = true;
            break;
        }
    }
    return log;
}

std::vector<Mode> detect_modes(const TrajectoryLog& log, double merge_tol) {
    if (log.snapshots.empty()) throw std::invalid_argument("detect_modes: empty log");
    const ParticleEnsemble& fin = log.snapshots.back();
    const std::size_t n = fin.size(), d = fin.dim;
    // single-linkage at merge_tol = connected components of the <=tol graph
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    const double tol2 = merge_tol * merge_tol;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double r2 = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                const double da = fin.point(i)[a] - fin.point(j)[a];
                r2 += da * da;
            }
            if (r2 <= tol2) parent[find(i)] = find(j);
        }
    std::vector<std::size_t> root_order; // deterministic: first-seen input order
    std::vector<Mode> modes;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        std::size_t k = 0;
        for (; k < root_order.size(); ++k)
            if (root_order[k] == r) break;
        if (k == root_order.size()) {
            root_order.push_back(r);
            modes.push_back(Mode{std::vector<double>(d, 0.0), 0});
        }
        modes[k].count += 1;
        for (std::size_t a = 0; a < d; ++a) modes[k].point[a] += fin.point(i)[a];
    }
    for (auto& m : modes)
        for (double& v : m.point) v /= static_cast<double>(m.count);
    return modes;
}

TrajectoryLog advect_with_velocity_field(const ParticleEnsemble& particles,
                                         const std::vector<DensityFrame>& frames,
                                         double a2) {
    if (frames.size() < 2) throw std::invalid_argument("advection needs at least 2 frames");
    TrajectoryLog log;
    log.snapshots.push_back(particles);
    log.timestamps.push_back(frames.front().time());
    ParticleEnsemble current = particles;
    const DomainGrid& g = frames.front().grid();
    const std::size_t dim = g.dim();
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        const VelocityField u = velocity_field(frames[k], a2);
        const double dt = frames[k + 1].time() - frames[k].time();
        std::vector<double> step2(current.size(), 0.0);
        parallel_for(current.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t p = lo; p < hi; ++p) {
                double* xp = current.point(p);
                // locate the cell and in-cell fractions at the pre-move
                // position; outside the box the velocity is zero
                bool inside = true;
                std::size_t base[8];
                double frac[8];
                for (std::size_t a = 0; a < dim; ++a) {
                    const double pos = (xp[a] - g.lo(a)) / g.spacing(a);
                    if (pos < 0.0 || pos > static_cast<double>(g.count(a) - 1)) {
                        inside = false;
                        break;
                    }
                    base[a] = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                    g.count(a) - 2);
                    frac[a] = pos - static_cast<double>(base[a]);
                }
                double s2 = 0.0;
                for (std::size_t a = 0; a < dim; ++a) {
                    double ua = 0.0;
                    if (inside) {
                        for (std::size_t corner = 0; corner < (1u << dim); ++corner) {
                            double w = 1.0;
                            std::size_t flat = 0;
                            for (std::size_t b = 0; b < dim; ++b) {
                                const bool hi_side = (corner >> b) & 1u;
                                w *= hi_side ? frac[b] : 1.0 - frac[b];
                                flat = flat * g.count(b) + base[b] + (hi_side ? 1 : 0);
                            }
                            ua += w * u.components[a][flat];
                        }
                    }
                    const double da = ua * dt;
                    xp[a] += da;
                    s2 += da * da;
                }
                step2[p] = s2;
            }
        });
        double max2 = 0.0;
        for (double s : step2) max2 = std::max(max2, s);
        log.max_step.push_back(std::sqrt(max2));
        log.snapshots.push_back(current);
        log.timestamps.push_back(frames[k + 1].time());
    }
    log.converged = true;
    return log;
}

} // namespace mslab
