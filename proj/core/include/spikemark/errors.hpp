#pragma once

#include <stdexcept>
#include <string>

namespace spikemark {

/// Invalid input: malformed files, inconsistent dimensions, bad configuration.
/// Mapped to exit code 3 by the command-line tool.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-finite intermediate values, diverging integration,
/// singular systems. Mapped to exit code 4 by the command-line tool.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spikemark
