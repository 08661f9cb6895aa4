#pragma once

#include <stdexcept>
#include <string>

namespace spinsim {

// Invalid device or run configuration (non-unit axis, gamma out of range, ...).
// Raised at construction time, never per event.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A count table with zero detected messengers cannot be normalized.
struct EmptyTableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File output failed; message carries the path and cause.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace spinsim
