#pragma once

#include <stdexcept>
#include <string>

namespace langdiv {

// Invalid run configuration (bad flags, missing inputs). CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analysis preconditions violated (empty group, degenerate design, ...).
// CLI exit code 3.
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace langdiv
