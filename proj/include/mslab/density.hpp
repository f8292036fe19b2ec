#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mslab/grid.hpp"

namespace mslab {

// Probability density sampled on a DomainGrid at one time stamp.
// Invariants: values >= 0 everywhere; trapezoidal mass within 1e-6 of 1.
class DensityFrame {
public:
    DensityFrame() = default;

    // renormalize=true divides by the quadrature mass so it becomes exactly 1;
    // otherwise the 1e-6 mass invariant is checked as-is. Values equal to
    // tiny negative round-off (>= -1e-12 relative to the peak) are clipped
    // to 0; anything more negative is rejected.
    DensityFrame(DomainGrid grid, std::vector<double> values, double time,
                 bool renormalize = false);

    const DomainGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double time() const { return time_; }

    double value(std::size_t flat) const { return values_[flat]; }
    std::size_t size() const { return values_.size(); }

    // Trapezoidal quadrature of the values over the grid.
    double mass() const;

    DensityFrame with_time(double t) const { return DensityFrame(grid_, values_, t, false); }

private:
    DomainGrid grid_;
    std::vector<double> values_;
    double time_ = 0.0;
};

// Trapezoidal quadrature of an arbitrary node array over a grid.
double quadrature(const DomainGrid& grid, const std::vector<double>& values);

// Shared-isotropic-variance Gaussian mixture: weights sum to 1, sigma2 > 0.
struct GaussianMixtureModel {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    double sigma2 = 1.0;

    std::size_t dim() const { return means.empty() ? 0 : means[0].size(); }
    void validate() const;
};

// N points in R^n, stored flat row-major.
struct ParticleEnsemble {
    std::vector<double> positions;
    std::size_t dim = 1;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return dim == 0 ? 0 : positions.size() / dim; }
    const double* point(std::size_t i) const { return positions.data() + i * dim; }
    double* point(std::size_t i) { return positions.data() + i * dim; }
};

enum class KernelKind { gaussian, flat_ball };

// Kernel for mean-shift maps and KDE: bandwidth is the Gaussian scale or
// the flat-ball radius; optional per-sample weights default to 1.
struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double bandwidth = 1.0;
    std::vector<double> weights;

    void validate(std::size_t n_samples) const;
};

double gmm_eval(const GaussianMixtureModel& model, const std::vector<double>& x);

// Rasterizes the mixture; requires the grid to cover mu +- 6*sigma on each
// axis (throws GridTooSmall), renormalizes the frame mass to exactly 1.
DensityFrame gmm_rasterize(const GaussianMixtureModel& model, const DomainGrid& grid,
                           double time);

// Gaussian-kernel density estimate on the grid, normalized to unit mass.
DensityFrame kde_estimate(const ParticleEnsemble& particles, const KernelSpec& kernel,
                          const DomainGrid& grid, double time = 0.0);

// Normal-reference bandwidth 1.06 * std * N^(-1/5) along one axis.
double default_bandwidth(const ParticleEnsemble& particles, std::size_t axis = 0);

// Partial derivative of a node array along one axis: central differences
// in the interior, one-sided at the boundary.
std::vector<double> grid_derivative(const DomainGrid& grid,
                                    const std::vector<double>& values, std::size_t axis);

// Central differences in the interior, one-sided at the boundary;
// one component field per axis.
std::vector<std::vector<double>> density_gradient(const DensityFrame& frame);

// Draws N points from the mixture with a fixed seed (mt19937_64 stream).
ParticleEnsemble sample_mixture(const GaussianMixtureModel& model, std::size_t n,
                                std::uint64_t seed);

} // namespace mslab
