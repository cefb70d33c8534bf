#pragma once

#include <stdexcept>
#include <string>

namespace krivine {

// Numeric or convergence failure (truncation cap exceeded, unattainable
// target, kernel not PSD, ...). The CLI maps these to exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (CSV/JSON instance, grid partition). Exit code 1.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace krivine
