/** @file error.hpp

    @brief Exception type shared by all modules.
*/
#pragma once

#include <stdexcept>
#include <string>

namespace ieti {

enum class ErrorKind {
    InvalidSmoothness,
    InvalidKnotVector,
    OutOfDomain,
    Geometry,
    Parse,
    NonMatchingInterface,
    Conformity,
    FullyMatching,
    Multiplicity,
    UnknownVariant,
    SingularMatrix,
    DimensionMismatch,
    Configuration,
    SizeGuard,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace ieti
