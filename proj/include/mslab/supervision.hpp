#pragma once

#include <vector>

#include "mslab/density.hpp"

namespace mslab {

enum class SinkKind { zero, gaussian_well, tabulated };

// Space-time forcing term psi(x, t). Sign convention: psi > 0 adds density
// (source), psi < 0 removes it (sink). A gaussian_well with positive
// strength evaluates to -strength * exp(-|x-center|^2 / (2 width^2)), i.e.
// drains density near its center as time runs forward.
struct SinkFunction {
    SinkKind kind = SinkKind::zero;

    // gaussian_well
    std::vector<double> center;
    double width = 1.0;
    double strength = 0.0;

    // tabulated: values[s] sampled on `grid` at time_samples[s]; evaluation
    // snaps to the nearest node and nearest time sample.
    DomainGrid grid;
    std::vector<double> time_samples;
    std::vector<std::vector<double>> values;

    void validate() const;
    double eval(const std::vector<double>& x, double t) const;

    static SinkFunction zero_sink() { return SinkFunction{}; }
    static SinkFunction gaussian(std::vector<double> center, double width,
                                 double strength);
};

// Homogeneous + forced split of the supervised solution at time t:
// f = (g1 + g2) / M with M the quadrature mass of g1 + g2.
struct SupervisedSolution {
    DensityFrame g1;            // homogeneous part (unit mass)
    std::vector<double> g2;     // forcing part, signed, grid-aligned with g1
    DensityFrame f;             // normalized combination
    double mass = 1.0;          // M
};

// Gaussian kernel in x - xi with variance 2*a2*(tau - t); requires
// t < tau <= 0 (InvalidTimeOrder otherwise). Integrates to 1 over x.
double green_kernel(const std::vector<double>& x, const std::vector<double>& xi,
                    double t, double tau, double a2);

// Superposition solution at t <= 0 from the t=0 profile: g1 is the heat
// kernel solution; g2 accumulates the forcing against the kernel by
// composite-midpoint quadrature over tau in (t, 0) and trapezoid quadrature
// over xi. g1 + g2 more negative than -1e-8 relative to its peak (or with
// non-positive mass) throws InvalidSupervision.
SupervisedSolution duhamel_solution(const DensityFrame& initial, const SinkFunction& sink,
                                    double a2, double t, std::size_t tau_nodes = 64);

// Same split with g1 the closed-form mixture at sigma2 = 2*a2*(-t)
// rasterized on `grid` (t = 0 is the delta limit and throws InvalidTime).
SupervisedSolution supervised_mixture_solution(const GaussianMixtureModel& model,
                                               const SinkFunction& sink, double a2,
                                               double t, const DomainGrid& grid,
                                               std::size_t tau_nodes = 64);

// Sup-norm over interior nodes of du/dt + a2 lap u - psi at time t for the
// pre-normalization combination u = g1 + g2: du/dt by central difference
// over t +- delta (three solutions), lap by second differences. Grid and
// tau refinement shrink it together.
double duhamel_residual_probe(const DensityFrame& initial, const SinkFunction& sink,
                              double a2, double t, std::size_t tau_nodes, double delta);

} // namespace mslab
