#pragma once

#include <stdexcept>
#include <string>

namespace qhi {

// Shape/size mismatches on matrix inputs.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Bad experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Evolution time outside the identifiable window (CLI exit code 3).
class AssumptionViolation : public std::runtime_error {
public:
    explicit AssumptionViolation(const std::string& what) : std::runtime_error(what) {}
};

// Data too degenerate to carry a rank-one fit (CLI exit code 4).
class DegenerateData : public std::runtime_error {
public:
    explicit DegenerateData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qhi
