#pragma once

#include <stdexcept>
#include <string>

namespace ssr {

// Thrown when a numerical routine cannot produce a trustworthy result
// (LP failure, symmetry violation, divergent accumulation).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by file readers/writers.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ssr
