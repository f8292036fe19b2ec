#include "mslab/heat.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mslab/errors.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

namespace {

// One separable convolution pass along `axis` with the unit-mass Gaussian
// kernel of variance sigma2, folding in that axis's trapezoid weights.
std::vector<double> convolve_axis(const DomainGrid& grid, const std::vector<double>& in,
                                  std::size_t axis, double sigma2) {
    const std::size_t n = grid.count(axis);
    const double h = grid.spacing(axis);
    std::vector<double> kernel(n);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma2);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = static_cast<double>(k) * h;
        kernel[k] = norm * std::exp(-d * d / (2.0 * sigma2));
    }

    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < grid.dim(); ++a) stride *= grid.count(a);
    const std::size_t lines = in.size() / n;

    std::vector<double> out(in.size());
    parallel_for(lines, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t line = lo; line < hi; ++line) {
            const std::size_t block = line / stride;
            const std::size_t base = block * stride * n + line % stride;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const std::size_t k = i > j ? i - j : j - i;
                    acc += in[base + j * stride] * grid.axis_weight(axis, j) * kernel[k];
                }
                out[base + i * stride] = acc;
            }
        }
    });
    return out;
}

} // namespace

std::vector<double> gaussian_convolve(const DomainGrid& grid,
                                      const std::vector<double>& values, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("convolve: sigma2 must be positive");
    std::vector<double> out = values;
    for (std::size_t a = 0; a < grid.dim(); ++a) out = convolve_axis(grid, out, a, sigma2);
    return out;
}

DensityFrame heat_kernel_solution(const DensityFrame& initial, double a2, double t) {
    if (t > 0.0) throw InvalidTime("heat kernel solution requires t <= 0");
    if (!(a2 > 0.0)) throw std::invalid_argument("heat kernel: a2 must be positive");
    if (t == 0.0) return initial.with_time(0.0);

    std::vector<double> values =
        gaussian_convolve(initial.grid(), initial.values(), 2.0 * a2 * (-t));
    return DensityFrame(initial.grid(), std::move(values), t, /*renormalize=*/false);
}

EvolvedMixture mixture_evolution(const GaussianMixtureModel& model, double a2,
                                 double t0, double t1) {
    model.validate();
    if (!(t0 < 0.0)) throw std::invalid_argument("mixture evolution: t0 must be negative");
    if (!(t0 <= t1 && t1 <= 0.0))
        throw std::invalid_argument("mixture evolution: need t0 <= t1 <= 0");
    if (std::abs(model.sigma2 - 2.0 * a2 * (-t0)) > 1e-9)
        throw InconsistentVariance("mixture variance is off the 2*a2*(-t) family");

    EvolvedMixture out;
    out.model = model;
    if (t1 != t0) out.model.sigma2 = 2.0 * a2 * (-t1);
    out.degenerate = (t1 == 0.0);
    return out;
}

} // namespace mslab
