#pragma once

#include <stdexcept>
#include <string>

namespace toptwo {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
struct domain_error : error {
    using error::error;
};

// A point lies outside the support of a density. Kept separate from
// domain_error so that callers (e.g. the MLE) can react to tied pairs.
struct support_error : error {
    using error::error;
};

// All observations in a sample coincide; the MLE does not exist.
struct degeneracy_error : error {
    using error::error;
};

// Root bracketing exhausted its expansion range.
struct no_root_error : error {
    using error::error;
};

// The input series is too short for the requested block scheme.
struct insufficient_data_error : error {
    using error::error;
};

// Invalid configuration (CLI flags, experiment configs, column specs).
struct config_error : error {
    using error::error;
};

// Malformed or unusable input data (files, series contents).
struct data_error : error {
    using error::error;
};

} // namespace toptwo
