#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace springstring {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy. InvalidArgument covers anything a caller could have
// validated up front; the CLI maps it to exit status 2, everything else to 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Time step too large for the explicit scheme.
class CflError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// Evaluation exactly at a singularity of a closed form (ω = Ωκ, τ = 0, ...).
class PoleError : public Error {
public:
    using Error::Error;
};

// Evaluation exactly at the dispersion branch point ω = ω₀.
class BranchPointError : public Error {
public:
    using Error::Error;
};

// A root finder could not bracket or converge.
class BracketError : public Error {
public:
    using Error::Error;
};

// Two independent evaluation routes disagreed, or a non-finite value appeared.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Dimensionless model configuration (M = c = μ₀ = T₀ = 1).
///
/// Built with designated initializers:
///   ModelParams{.kappa = 0.5, .mass_gap = 0.3, .bare_frequency = 1.0}
struct ModelParams {
    double kappa = 0.0;          // coupling spring stiffness κ
    double mass_gap = 0.0;       // string mass gap ω₀ (0 for a d'Alembert string)
    double bare_frequency = 1.0; // free oscillator frequency Ω₀
};

/// Throws InvalidArgument unless κ ≥ 0, ω₀ ≥ 0, Ω₀ > 0 and all are finite.
void validate(const ModelParams& p);

std::string describe(const ModelParams& p);

} // namespace springstring
