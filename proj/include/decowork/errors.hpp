// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace decowork {

// Bad input: dimensions, ranges, malformed configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical invariant broke (norm drift, non-finite amplitudes, degenerate basis, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A rate estimator could not extract a decay from the series.
class InsufficientDecay : public NumericalError {
public:
    explicit InsufficientDecay(const std::string& what) : NumericalError(what) {}
};

} // namespace decowork
