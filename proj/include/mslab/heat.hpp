#pragma once

#include <vector>

#include "mslab/density.hpp"

namespace mslab {

// Convolves a node array with the unit-mass isotropic Gaussian of variance
// sigma2 by trapezoidal quadrature, one separable pass per axis.
std::vector<double> gaussian_convolve(const DomainGrid& grid,
                                      const std::vector<double>& values, double sigma2);

// Convolves the t=0 profile with the Gaussian heat kernel of variance
// 2*a2*(-t) by trapezoidal quadrature (separable per axis). t = 0 returns
// the profile unchanged (delta-kernel limit); t > 0 throws InvalidTime.
// Mass is not renormalized: the 1e-6 frame invariant guards coverage.
DensityFrame heat_kernel_solution(const DensityFrame& initial, double a2, double t);

struct EvolvedMixture {
    GaussianMixtureModel model;
    bool degenerate = false; // t1 = 0: delta limit, model not evaluable
};

// Moves a mixture along the self-similar family: same weights and means,
// sigma2 = 2*a2*(-t1). Requires the input to sit on the family at t0
// (|sigma2 - 2*a2*(-t0)| <= 1e-9, else InconsistentVariance) and
// t0 <= t1 <= 0; t1 = t0 hands the model back unchanged.
EvolvedMixture mixture_evolution(const GaussianMixtureModel& model, double a2,
                                 double t0, double t1);

} // namespace mslab
