#pragma once

#include <stdexcept>
#include <string>

namespace rdgcn {

// Bad user input: malformed files, out-of-range flags, inconsistent datasets.
// The CLI maps this family to exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal contract or numeric failure (non-finite values, cache
// desync). The CLI maps this family to exit code 2.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdgcn
