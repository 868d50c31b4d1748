#pragma once

#include <stdexcept>
#include <string>

namespace tridram {

// One exception type per error class named in the module contracts, so
// callers and tests can catch precisely.

struct InvalidGeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidPackingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InfeasiblePackingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedTopologyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct UnmappedAddressError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct UnknownPresetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SimulationAbortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLargeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UndefinedUtilizationError : std::domain_error {
    using std::domain_error::domain_error;
};

struct IncompleteResultsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tridram
