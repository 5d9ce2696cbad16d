#ifndef TELEPORTSIM_ERRORS_HPP
#define TELEPORTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace teleportsim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonHermitianInput : Error {
    explicit NonHermitianInput(const std::string& msg) : Error(msg) {}
};

struct BadSubsystemIndex : Error {
    explicit BadSubsystemIndex(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct UnsupportedAtomCount : Error {
    explicit UnsupportedAtomCount(const std::string& msg) : Error(msg) {}
};

struct StepTooLarge : Error {
    explicit StepTooLarge(const std::string& msg) : Error(msg) {}
};

struct TimingNotSatisfied : Error {
    explicit TimingNotSatisfied(const std::string& msg) : Error(msg) {}
};

struct TruncationTooSevere : Error {
    explicit TruncationTooSevere(const std::string& msg) : Error(msg) {}
};

struct PositivityLost : Error {
    explicit PositivityLost(const std::string& msg) : Error(msg) {}
};

struct ConfigParseError : Error {
    explicit ConfigParseError(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

} // namespace teleportsim

#endif // TELEPORTSIM_ERRORS_HPP
