#include "mslab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mslab/errors.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double gauss_norm(double sigma2, std::size_t dim) {
    return std::pow(kTwoPi * sigma2, -0.5 * static_cast<double>(dim));
}
} // namespace

double quadrature(const DomainGrid& grid, const std::vector<double>& values) {
    return deterministic_sum(values.size(), [&](std::size_t i) {
        std::size_t idx[8];
        grid.unravel(i, idx);
        return values[i] * grid.node_weight(idx);
    });
}

DensityFrame::DensityFrame(DomainGrid grid, std::vector<double> values, double time,
                           bool renormalize)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
    if (values_.size() != grid_.nodes())
        throw std::invalid_argument("frame: value count does not match grid");
    double peak = 0.0;
    for (double v : values_) peak = std::max(peak, v);
    const double clip_floor = -1e-12 * std::max(peak, 1e-300);
    for (double& v : values_) {
        if (v < 0.0) {
            if (v < clip_floor)
                throw std::invalid_argument("frame: negative density value");
            v = 0.0;
        }
    }
    const double m = quadrature(grid_, values_);
    if (renormalize) {
        if (m <= 0.0) throw std::invalid_argument("frame: zero mass");
        for (double& v : values_) v /= m;
    } else if (std::abs(m - 1.0) > 1e-6) {
        throw std::invalid_argument("frame: quadrature mass deviates from 1 beyond 1e-6");
    }
}

double DensityFrame::mass() const { return quadrature(grid_, values_); }

void GaussianMixtureModel::validate() const {
    if (weights.empty() || weights.size() != means.size())
        throw std::invalid_argument("mixture: weights/means size mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mixture: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mixture: sigma2 must be positive");
    const std::size_t d = means[0].size();
    for (const auto& mu : means)
        if (mu.size() != d) throw std::invalid_argument("mixture: mean dimension mismatch");
}

void KernelSpec::validate(std::size_t n_samples) const {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be positive");
    if (!weights.empty()) {
        if (weights.size() != n_samples)
            throw std::invalid_argument("kernel: weight count does not match samples");
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("kernel: negative weight");
            sum += w;
        }
        if (sum == 0.0) throw std::invalid_argument("kernel: weights all zero");
    }
}

double gmm_eval(const GaussianMixtureModel& model, const std::vector<double>& x) {
    model.validate();
    if (x.size() != model.dim())
        throw std::invalid_argument("gmm_eval: point dimension mismatch");
    const double norm = gauss_norm(model.sigma2, model.dim());
    double f = 0.0;
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            const double dxa = x[a] - model.means[j][a];
            r2 += dxa * dxa;
        }
        f += model.weights[j] * norm * std::exp(-r2 / (2.0 * model.sigma2));
    }
    return f;
}

DensityFrame gmm_rasterize(const GaussianMixtureModel& model, const DomainGrid& grid,
                           double time) {
    model.validate();
    if (grid.dim() != model.dim())
        throw std::invalid_argument("gmm_rasterize: grid dimension mismatch");
    const double six_sigma = 6.0 * std::sqrt(model.sigma2);
    for (const auto& mu : model.means)
        for (std::size_t a = 0; a < grid.dim(); ++a)
            if (mu[a] - six_sigma < grid.lo(a) || mu[a] + six_sigma > grid.hi(a))
                throw GridTooSmall("grid does not cover mean +- 6 sigma on axis " +
                                   std::to_string(a));
    std::vector<double> values(grid.nodes());
    parallel_for(values.size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(grid.dim());
        std::size_t idx[8];
        for (std::size_t i = lo; i < hi; ++i) {
            grid.unravel(i, idx);
            for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coord(a, idx[a]);
            values[i] = gmm_eval(model, x);
        }
    });
    return DensityFrame(grid, std::move(values), time, /*renormalize=*/true);
}

DensityFrame kde_estimate(const ParticleEnsemble& particles, const KernelSpec& kernel,
                          const DomainGrid& grid, double time) {
    if (particles.size() == 0) throw std::invalid_argument("kde: empty ensemble");
    if (particles.dim != grid.dim())
        throw std::invalid_argument("kde: particle/grid dimension mismatch");
    if (kernel.kind != KernelKind::gaussian)
        throw std::invalid_argument("kde: only the gaussian kernel estimates densities");
    kernel.validate(particles.size());
    const double bw2 = kernel.bandwidth * kernel.bandwidth;
    const double norm = gauss_norm(bw2, grid.dim());
    const std::size_t n_pts = particles.size();
    std::vector<double> values(grid.nodes());
    parallel_for(values.size(), [&](std::size_t lo, std::size_t hi) {
        std::size_t idx[8];
        std::vector<double> x(grid.dim());
        for (std::size_t i = lo; i < hi; ++i) {
            grid.unravel(i, idx);
            for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coord(a, idx[a]);
            double acc = 0.0, wsum = 0.0;
            for (std::size_t p = 0; p < n_pts; ++p) {
                const double* s = particles.point(p);
                double r2 = 0.0;
                for (std::size_t a = 0; a < grid.dim(); ++a) {
                    const double dxa = x[a] - s[a];
                    r2 += dxa * dxa;
                }
                const double w = kernel.weights.empty() ? 1.0 : kernel.weights[p];
                acc += w * std::exp(-r2 / (2.0 * bw2));
                wsum += w;
            }
            values[i] = norm * acc / wsum;
        }
    });
    return DensityFrame(grid, std::move(values), time, /*renormalize=*/true);
}

double default_bandwidth(const ParticleEnsemble& particles, std::size_t axis) {
    const std::size_t n = particles.size();
    if (n < 2) throw std::invalid_argument("bandwidth rule needs at least 2 points");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += particles.point(i)[axis];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = particles.point(i)[axis] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    return 1.06 * std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> grid_derivative(const DomainGrid& g, const std::vector<double>& f,
                                    std::size_t axis) {
    if (f.size() != g.nodes())
        throw std::invalid_argument("derivative: value count does not match grid");
    // stride of one step along the axis in the flat row-major layout
    std::size_t stride = 1;
    for (std::size_t b = axis + 1; b < g.dim(); ++b) stride *= g.count(b);
    const double h = g.spacing(axis);
    const std::size_t na = g.count(axis);
    std::vector<double> out(f.size());
    parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
        std::size_t idx[8];
        for (std::size_t i = lo; i < hi; ++i) {
            g.unravel(i, idx);
            const std::size_t ia = idx[axis];
            if (ia == 0)
                out[i] = (f[i + stride] - f[i]) / h;
            else if (ia + 1 == na)
                out[i] = (f[i] - f[i - stride]) / h;
            else
                out[i] = (f[i + stride] - f[i - stride]) / (2.0 * h);
        }
    });
    return out;
}

std::vector<std::vector<double>> density_gradient(const DensityFrame& frame) {
    std::vector<std::vector<double>> grad;
    grad.reserve(frame.grid().dim());
    for (std::size_t a = 0; a < frame.grid().dim(); ++a)
        grad.push_back(grid_derivative(frame.grid(), frame.values(), a));
    return grad;
}

ParticleEnsemble sample_mixture(const GaussianMixtureModel& model, std::size_t n,
                                std::uint64_t seed) {
    model.validate();
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> comp(model.weights.begin(), model.weights.end());
    std::normal_distribution<double> normal(0.0, std::sqrt(model.sigma2));
    ParticleEnsemble out;
    out.dim = model.dim();
    out.seed = seed;
    out.positions.resize(n * out.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = model.weights.size() == 1 ? 0 : comp(rng);
        for (std::size_t a = 0; a < out.dim; ++a)
            out.positions[i * out.dim + a] = model.means[j][a] + normal(rng);
    }
    return out;
}

} // namespace mslab
