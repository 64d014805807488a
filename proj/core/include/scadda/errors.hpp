#pragma once

#include <stdexcept>

namespace scadda {

// Invalid or inconsistent input data (malformed CSV, out-of-range
// coordinate, ...). The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter or parameter combination. CLI exit code 1.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A broken internal invariant. CLI exit code 3.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace scadda
