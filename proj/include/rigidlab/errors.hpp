#pragma once

#include <stdexcept>
#include <string>

namespace rigidlab {

/// Base class for all library errors. The exit code is what the CLI returns.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, int exit_code = 1)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

#define RIGIDLAB_ERROR(Name, code)                                          \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what, code) {} \
    };

RIGIDLAB_ERROR(InvalidMap, 64)
RIGIDLAB_ERROR(ConfigError, 64)
RIGIDLAB_ERROR(PreconditionViolation, 1)
RIGIDLAB_ERROR(NewtonDivergence, 1)
RIGIDLAB_ERROR(EnumerationCapExceeded, 1)
RIGIDLAB_ERROR(NoConvergence, 1)
RIGIDLAB_ERROR(SeriesStall, 2)
RIGIDLAB_ERROR(OrbitPairingFailure, 3)
RIGIDLAB_ERROR(LinearPartMismatch, 1)
RIGIDLAB_ERROR(InsufficientResolution, 1)
RIGIDLAB_ERROR(CounterexampleFound, 2)
RIGIDLAB_ERROR(VerificationFailure, 2)

#undef RIGIDLAB_ERROR

}  // namespace rigidlab
