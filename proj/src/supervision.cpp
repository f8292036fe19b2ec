#include "mslab/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mslab/errors.hpp"
#include "mslab/heat.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

void SinkFunction::validate() const {
    switch (kind) {
    case SinkKind::zero:
        return;
    case SinkKind::gaussian_well:
        if (center.empty()) throw std::invalid_argument("sink: gaussian well needs a center");
        if (!(width > 0.0)) throw std::invalid_argument("sink: width must be positive");
        return;
    case SinkKind::tabulated: {
        if (time_samples.empty() || values.size() != time_samples.size())
            throw std::invalid_argument("sink: one value table per time sample required");
        for (const auto& table : values) {
            if (table.size() != grid.nodes())
                throw std::invalid_argument("sink: value table does not match the grid");
            for (double v : table)
                if (!std::isfinite(v))
                    throw std::invalid_argument("sink: tabulated values must be finite");
        }
        return;
    }
    }
    throw std::invalid_argument("sink: unknown kind");
}

double SinkFunction::eval(const std::vector<double>& x, double t) const {
    switch (kind) {
    case SinkKind::zero:
        return 0.0;
    case SinkKind::gaussian_well: {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            const double d = x[a] - (a < center.size() ? center[a] : 0.0);
            r2 += d * d;
        }
        return -strength * std::exp(-r2 / (2.0 * width * width));
    }
    case SinkKind::tabulated: {
        std::size_t best = 0;
        for (std::size_t s = 1; s < time_samples.size(); ++s)
            if (std::abs(time_samples[s] - t) < std::abs(time_samples[best] - t)) best = s;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double pos = (x[a] - grid.lo(a)) / grid.spacing(a);
            const auto i = static_cast<std::size_t>(std::clamp(
                std::llround(pos), 0LL, static_cast<long long>(grid.count(a)) - 1));
            flat = flat * grid.count(a) + i;
        }
        return values[best][flat];
    }
    }
    throw std::invalid_argument("sink: unknown kind");
}

SinkFunction SinkFunction::gaussian(std::vector<double> center, double width,
                                    double strength) {
    SinkFunction sink;
    sink.kind = SinkKind::gaussian_well;
    sink.center = std::move(center);
    sink.width = width;
    sink.strength = strength;
    sink.validate();
    return sink;
}

double green_kernel(const std::vector<double>& x, const std::vector<double>& xi,
                    double t, double tau, double a2) {
    if (x.size() != xi.size())
        throw std::invalid_argument("green kernel: dimension mismatch");
    if (!(t < tau && tau <= 0.0))
        throw InvalidTimeOrder("green kernel requires t < tau <= 0");
    const double sigma2 = 2.0 * a2 * (tau - t);
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double d = x[a] - xi[a];
        r2 += d * d;
    }
    const double norm =
        std::pow(2.0 * std::numbers::pi * sigma2, -0.5 * static_cast<double>(x.size()));
    return norm * std::exp(-r2 / (2.0 * sigma2));
}

namespace {

// g2(x) = -int_t^0 int psi(xi,tau) G(x-xi; 2 a2 (tau-t)) dxi dtau:
// composite midpoint over tau (kernel degenerates at tau=t, which the
// midpoint nodes avoid), trapezoid + separable Gaussian convolution in xi.
// The minus sign makes d f/dt + a2 lap f - psi vanish for the combination.
std::vector<double> forcing_part(const DomainGrid& grid, const SinkFunction& sink,
                                 double a2, double t, std::size_t tau_nodes) {
    std::vector<double> g2(grid.nodes(), 0.0);
    if (sink.kind == SinkKind::zero || t == 0.0) return g2;
    if (tau_nodes == 0) throw std::invalid_argument("duhamel: tau node count must be positive");

    const double dtau = -t / static_cast<double>(tau_nodes);
    std::vector<double> psi(grid.nodes());
    std::vector<double> x(grid.dim());
    std::size_t idx[8];
    for (std::size_t k = 0; k < tau_nodes; ++k) {
        const double tau = t + (static_cast<double>(k) + 0.5) * dtau;
        for (std::size_t j = 0; j < grid.nodes(); ++j) {
            grid.unravel(j, idx);
            for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coord(a, idx[a]);
            psi[j] = sink.eval(x, tau);
        }
        const double sigma2 = 2.0 * a2 * (tau - t);
        std::vector<double> smeared = gaussian_convolve(grid, psi, sigma2);
        for (std::size_t j = 0; j < g2.size(); ++j) g2[j] -= dtau * smeared[j];
    }
    return g2;
}

SupervisedSolution combine(DensityFrame g1, std::vector<double> g2) {
    const DomainGrid& grid = g1.grid();
    std::vector<double> combined(g1.size());
    double peak = 0.0;
    for (std::size_t j = 0; j < combined.size(); ++j) {
        combined[j] = g1.value(j) + g2[j];
        peak = std::max(peak, combined[j]);
    }
    for (double v : combined)
        if (v < -1e-8 * peak)
            throw InvalidSupervision("supervised combination is negative: sink too strong");
    const double mass = quadrature(grid, combined);
    if (!(mass > 0.0)) throw InvalidSupervision("supervised combination has no mass");

    std::vector<double> fvals(combined.size());
    for (std::size_t j = 0; j < combined.size(); ++j)
        fvals[j] = std::max(combined[j], 0.0) / mass;

    SupervisedSolution out;
    out.f = DensityFrame(grid, std::move(fvals), g1.time(), /*renormalize=*/false);
    out.g1 = std::move(g1);
    out.g2 = std::move(g2);
    out.mass = mass;
    return out;
}

} // namespace

SupervisedSolution duhamel_solution(const DensityFrame& initial, const SinkFunction& sink,
                                    double a2, double t, std::size_t tau_nodes) {
    sink.validate();
    DensityFrame g1 = heat_kernel_solution(initial, a2, t);
    std::vector<double> g2 = forcing_part(initial.grid(), sink, a2, t, tau_nodes);
    return combine(std::move(g1), std::move(g2));
}

SupervisedSolution supervised_mixture_solution(const GaussianMixtureModel& model,
                                               const SinkFunction& sink, double a2,
                                               double t, const DomainGrid& grid,
                                               std::size_t tau_nodes) {
    if (t > 0.0) throw InvalidTime("supervised mixture solution requires t <= 0");
    if (t == 0.0) throw InvalidTime("supervised mixture solution: t = 0 is the delta limit");
    sink.validate();
    // The input supplies weights and means; the homogeneous part is the
    // self-similar profile at sigma2 = 2*a2*(-t) regardless of model.sigma2.
    GaussianMixtureModel at_t = model;
    at_t.sigma2 = 2.0 * a2 * (-t);
    DensityFrame g1 = gmm_rasterize(at_t, grid, t);
    std::vector<double> g2 = forcing_part(grid, sink, a2, t, tau_nodes);
    return combine(std::move(g1), std::move(g2));
}

double duhamel_residual_probe(const DensityFrame& initial, const SinkFunction& sink,
                              double a2, double t, std::size_t tau_nodes, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("residual probe: delta must be positive");
    if (!(t + delta <= 0.0))
        throw std::invalid_argument("residual probe: t + delta must stay <= 0");
    const DomainGrid& g = initial.grid();

    const auto combination = [&](double at) {
        const SupervisedSolution sol = duhamel_solution(initial, sink, a2, at, tau_nodes);
        std::vector<double> u(sol.g1.size());
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = sol.g1.value(j) + sol.g2[j];
        return u;
    };
    const std::vector<double> u_minus = combination(t - delta);
    const std::vector<double> u_mid = combination(t);
    const std::vector<double> u_plus = combination(t + delta);

    // second differences per axis, accumulated into the laplacian
    std::vector<double> lap(g.nodes(), 0.0);
    std::vector<char> interior(g.nodes(), 1);
    for (std::size_t a = 0; a < g.dim(); ++a) {
        std::size_t stride = 1;
        for (std::size_t b = a + 1; b < g.dim(); ++b) stride *= g.count(b);
        const double h2 = g.spacing(a) * g.spacing(a);
        std::size_t idx[8];
        for (std::size_t i = 0; i < g.nodes(); ++i) {
            g.unravel(i, idx);
            if (idx[a] == 0 || idx[a] + 1 == g.count(a)) {
                interior[i] = 0;
                continue;
            }
            lap[i] += (u_mid[i + stride] - 2.0 * u_mid[i] + u_mid[i - stride]) / h2;
        }
    }

    double sup = 0.0;
    std::vector<double> x(g.dim());
    std::size_t idx[8];
    for (std::size_t i = 0; i < g.nodes(); ++i) {
        if (!interior[i]) continue;
        g.unravel(i, idx);
        for (std::size_t a = 0; a < g.dim(); ++a) x[a] = g.coord(a, idx[a]);
        const double dudt = (u_plus[i] - u_minus[i]) / (2.0 * delta);
        const double r = dudt + a2 * lap[i] - sink.eval(x, t);
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

} // namespace mslab
