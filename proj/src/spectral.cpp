#include "mslab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mslab/errors.hpp"

namespace mslab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kExpGuard = 700.0; // exp overflow guard
constexpr double kNegligible = 1e-12;

std::vector<double> axis_frequencies(const DomainGrid& grid, std::size_t axis) {
    const std::size_t n = grid.count(axis);
    const double h = grid.spacing(axis);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = i < (n + 1) / 2 ? static_cast<double>(i)
                                         : static_cast<double>(i) - static_cast<double>(n);
        w[i] = kTwoPi * k / (static_cast<double>(n) * h);
    }
    return w;
}

void run_dft(const DomainGrid& grid, std::vector<std::complex<double>>& data, int sign) {
    std::vector<int> n(grid.dim());
    for (std::size_t a = 0; a < grid.dim(); ++a) n[a] = static_cast<int>(grid.count(a));
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft(static_cast<int>(grid.dim()), n.data(), ptr, ptr,
                                   sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

struct FrequencyTable {
    std::vector<std::vector<double>> w;     // per axis
    std::vector<std::vector<std::complex<double>>> phase; // exp(+i w lo) per axis

    explicit FrequencyTable(const DomainGrid& grid) {
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            w.push_back(axis_frequencies(grid, a));
            std::vector<std::complex<double>> ph(w.back().size());
            for (std::size_t i = 0; i < ph.size(); ++i)
                ph[i] = std::polar(1.0, w.back()[i] * grid.lo(a));
            phase.push_back(std::move(ph));
        }
    }

    double norm2(const std::size_t* idx) const {
        double s = 0.0;
        for (std::size_t a = 0; a < w.size(); ++a) s += w[a][idx[a]] * w[a][idx[a]];
        return s;
    }

    std::complex<double> phase_at(const std::size_t* idx) const {
        std::complex<double> p(1.0, 0.0);
        for (std::size_t a = 0; a < phase.size(); ++a) p *= phase[a][idx[a]];
        return p;
    }
};

std::vector<double> inverse_raw(const SpectralField& field) {
    const DomainGrid& g = field.grid;
    FrequencyTable tab(g);
    std::vector<std::complex<double>> buf(field.coeff.size());
    std::size_t idx[8];
    for (std::size_t i = 0; i < buf.size(); ++i) {
        g.unravel(i, idx);
        buf[i] = field.coeff[i] * std::conj(tab.phase_at(idx));
    }
    run_dft(g, buf, FFTW_FORWARD);
    double scale = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a)
        scale *= std::sqrt(kTwoPi) / (static_cast<double>(g.count(a)) * g.spacing(a));
    std::vector<double> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * scale;
    return out;
}

// Clips negatives (returning the clipped quadrature mass) and renormalizes.
DensityFrame clip_and_renormalize(const DomainGrid& grid, std::vector<double> values,
                                  double time, double* clipped_mass) {
    std::vector<double> negative(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) {
            negative[i] = -values[i];
            values[i] = 0.0;
        }
    }
    *clipped_mass = quadrature(grid, negative);
    return DensityFrame(grid, std::move(values), time, /*renormalize=*/true);
}

} // namespace

void EvolutionSpec::validate() const {
    if (substeps < 1) throw std::invalid_argument("evolution: substeps must be >= 1");
    if (!(blowup_threshold > 1.0))
        throw std::invalid_argument("evolution: blow-up threshold must be > 1");
    if (!(a2 > 0.0)) throw std::invalid_argument("evolution: a2 must be positive");
    if (omega_max && !(*omega_max > 0.0))
        throw std::invalid_argument("evolution: omega_max must be positive");
}

SpectralField spectral_transform(const DensityFrame& frame) {
    const DomainGrid& g = frame.grid();
    SpectralField field;
    field.grid = g;
    field.time = frame.time();
    field.coeff.assign(frame.values().begin(), frame.values().end());
    run_dft(g, field.coeff, FFTW_BACKWARD);
    double scale = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a)
        scale *= g.spacing(a) / std::sqrt(kTwoPi);
    FrequencyTable tab(g);
    std::size_t idx[8];
    for (std::size_t i = 0; i < field.coeff.size(); ++i) {
        g.unravel(i, idx);
        field.coeff[i] *= scale * tab.phase_at(idx);
    }
    return field;
}

DensityFrame spectral_inverse(const SpectralField& field) {
    return DensityFrame(field.grid, inverse_raw(field), field.time, /*renormalize=*/true);
}

EvolutionReport spectral_propagate_series(const DensityFrame& frame,
                                          const EvolutionSpec& spec) {
    spec.validate();
    const DomainGrid& g = frame.grid();
    const SpectralField phi0 = spectral_transform(frame);
    const FrequencyTable tab(g);
    const double f0_mag = std::abs(phi0.coeff[0]);
    const bool clustering = spec.dt() > 0.0;
    const double wmax2 = spec.omega_max ? (*spec.omega_max) * (*spec.omega_max)
                                        : std::numeric_limits<double>::infinity();

    EvolutionReport report;
    SpectralField view;
    view.grid = g;
    view.coeff.resize(phi0.coeff.size());
    std::size_t idx[8];
    for (std::size_t k = 0; k <= spec.substeps; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(spec.substeps);
        const double dt_k = spec.dt() * frac;
        const double t_k = spec.t_start + dt_k;
        double max_growth = 0.0, offending = 0.0;
        for (std::size_t i = 0; i < phi0.coeff.size(); ++i) {
            g.unravel(i, idx);
            const double w2 = tab.norm2(idx);
            if (clustering && w2 > wmax2) {
                view.coeff[i] = 0.0;
                continue;
            }
            const double expo = std::min(spec.a2 * w2 * dt_k, kExpGuard);
            view.coeff[i] = phi0.coeff[i] * std::exp(expo);
            if (clustering && dt_k > 0.0) {
                const double mag = std::abs(phi0.coeff[i]);
                if (mag >= kNegligible * f0_mag) {
                    const double growth = mag * std::expm1(expo) / f0_mag;
                    if (growth > max_growth) {
                        max_growth = growth;
                        offending = std::sqrt(w2);
                    }
                }
            }
        }
        if (clustering && max_growth > spec.blowup_threshold) {
            report.blew_up = true;
            report.offending_frequency = offending;
            throw SpectralBlowUp("coefficient growth " + std::to_string(max_growth) +
                                 " exceeds threshold at |w|=" + std::to_string(offending));
        }
        view.time = t_k;
        double clipped = 0.0;
        DensityFrame out = clip_and_renormalize(g, inverse_raw(view), t_k, &clipped);
        report.t_grid.push_back(t_k);
        report.mass_clipped.push_back(clipped);
        report.max_growth.push_back(max_growth);
        report.frames.push_back(std::move(out));
    }
    return report;
}

DensityFrame spectral_propagate(const DensityFrame& frame, const EvolutionSpec& spec) {
    EvolutionReport report = spectral_propagate_series(frame, spec);
    return std::move(report.frames.back());
}

StabilityReport stability_probe(const DensityFrame& frame, const EvolutionSpec& spec) {
    spec.validate();
    if (spec.dt() < 0.0)
        throw std::invalid_argument("stability probe: dt must be >= 0");
    const SpectralField phi0 = spectral_transform(frame);
    const FrequencyTable tab(frame.grid());
    const double f0_mag = std::abs(phi0.coeff[0]);
    const double wmax2 = spec.omega_max ? (*spec.omega_max) * (*spec.omega_max)
                                        : std::numeric_limits<double>::infinity();
    StabilityReport report;
    std::size_t idx[8];
    for (std::size_t i = 0; i < phi0.coeff.size(); ++i) {
        frame.grid().unravel(i, idx);
        const double w2 = tab.norm2(idx);
        if (w2 > wmax2) continue;
        const double mag = std::abs(phi0.coeff[i]);
        if (mag < kNegligible * f0_mag) continue;
        const double growth =
            mag * std::expm1(std::min(spec.a2 * w2 * spec.dt(), kExpGuard)) / f0_mag;
        if (growth > report.max_growth) {
            report.max_growth = growth;
            report.offending_frequency = std::sqrt(w2);
        }
    }
    report.blew_up = report.max_growth > spec.blowup_threshold;
    return report;
}

} // namespace mslab
