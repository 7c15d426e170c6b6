#pragma once

#include <stdexcept>
#include <string>

namespace specgap {

// Base class for all domain errors raised by the library. Callers that only
// need a coarse success/failure split can catch this; tests usually catch the
// concrete type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainNotFundamental : Error { using Error::Error; };
struct NoWells             : Error { using Error::Error; };
struct QuadratureFailure   : Error { using Error::Error; };
struct GridTooCoarse       : Error { using Error::Error; };
struct NonHermitianAssembly: Error { using Error::Error; };
struct TruncationTooSmall  : Error { using Error::Error; };
struct NoLevelSet          : Error { using Error::Error; };
struct CutoffClipped       : Error { using Error::Error; };
struct NoAdmissibleInteger : Error { using Error::Error; };
struct ResolutionTooFine   : Error { using Error::Error; };
struct WindowNotExhausted  : Error { using Error::Error; };
struct GridMismatch        : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct ConfigError         : Error { using Error::Error; };

// Raised when an eigenpair fails its residual tolerance after the iteration
// cap; carries the index of the offending pair.
class NoConvergence : public Error {
public:
    NoConvergence(int pair_index, const std::string& msg)
        : Error(msg), pair(pair_index) {}
    int pair;
};

} // namespace specgap
