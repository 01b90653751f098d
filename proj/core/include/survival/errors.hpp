#pragma once

#include <stdexcept>
#include <string>

namespace survival {

// Invalid model coefficients, jump laws, grids or configuration values.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or schema-violating run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Pivot breakdown, quadrature or iteration non-convergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace survival
