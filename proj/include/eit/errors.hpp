#pragma once

#include <stdexcept>
#include <string>

namespace eit {

// Invalid parameters, mesh/protocol mismatches, malformed domain data.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File system and parse failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver breakdowns that valid inputs should never trigger.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace eit
