#pragma once

#include <stdexcept>
#include <string>

namespace mslab {

// Common base so callers can catch laboratory errors apart from std ones.
// The CLI maps error classes to exit codes: ConfigError=2, IoError=3,
// everything else (wrapped as ExperimentError)=1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// density_core
struct GridTooSmall : Error { using Error::Error; };

// meanshift_engine
struct EmptyKernelSupport : Error { using Error::Error; };
struct ZeroDensity : Error { using Error::Error; };

// antidiffusion_pde
struct SpectralBlowUp : Error { using Error::Error; };
struct InvalidTime : Error { using Error::Error; };
struct InconsistentVariance : Error { using Error::Error; };

// supervision
struct InvalidTimeOrder : Error { using Error::Error; };
struct InvalidSupervision : Error { using Error::Error; };

// diagnostics
struct TimeMisalignment : Error { using Error::Error; };

// ingestion / io
struct ParseError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// lab_cli
struct ConfigError : Error { using Error::Error; };
struct ExperimentError : Error { using Error::Error; };

} // namespace mslab
