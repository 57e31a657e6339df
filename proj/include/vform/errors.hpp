#pragma once

#include <stdexcept>
#include <string>

namespace vform {

// Invalid or inconsistent configuration (bad field value, dimension mismatch).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Geometric degeneracy that leaves a metric undefined (coincident birds,
// eye lying on another bird's wing segment).
struct GeometryError : std::domain_error {
    using std::domain_error::domain_error;
};

// Value outside a metric's domain (zero-speed bird where a heading is needed).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Rejection sampling exhausted its attempt budget.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A batch worker failed; carries the per-run seed for reproduction.
struct BatchError : std::runtime_error {
    std::uint64_t run_seed;
    BatchError(const std::string& what, std::uint64_t seed)
        : std::runtime_error(what + " (run seed " + std::to_string(seed) + ")"),
          run_seed(seed) {}
};

// Broken internal invariant; indicates a bug, not bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace vform
