#pragma once

#include <stdexcept>
#include <string>

namespace wropt {

/// Field or vector shapes that do not agree with the grid they are used on.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Out-of-range numerical parameter (overlap width, Robin parameter, bounds, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A stencil or window request that the decomposition cannot serve.
class DecompositionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the local Newton solver inside a subdomain solve.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wropt
