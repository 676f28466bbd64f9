#pragma once

#include <stdexcept>
#include <string>

namespace kronldp {

// Invalid user input or configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver did not converge or hit a singular update (CLI exit code 2).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structure for which the requested quantity is undefined (CLI exit code 3).
struct DegenerateModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kronldp
