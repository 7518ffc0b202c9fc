#pragma once

#include <stdexcept>
#include <string>

namespace gsdde {

/// Invalid input or configuration: bad band, misaligned grid, malformed weights.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation produced a non-finite value or an unusable intermediate.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gsdde
