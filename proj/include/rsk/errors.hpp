#pragma once

#include <stdexcept>
#include <string>

namespace rsk {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a computation needs a closed-form associate that does not exist.
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegistryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rsk
