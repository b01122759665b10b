#pragma once

#include <stdexcept>
#include <string>

namespace polyprob {

enum class ErrorCode {
    DimensionMismatch,
    ZeroNormal,
    NonFiniteEntry,
    IndexOutOfRange,
    EmptyPolyhedron,
    LpNumericalFailure,
    SingularGram,
    NotOnHyperplane,
    UnboundedPolyhedron,
    GeneralPositionFailure,
    NotSquare,
    SingularNormals,
    ZeroDiagonal,
    StepUnderflow,
    MaxStepsExceeded,
    NoApplicableMethod,
    DimensionTooLarge,
    InvalidConfig,
    ParseError,
};

inline const char* error_code_name(ErrorCode c)
{
    switch (c) {
        case ErrorCode::DimensionMismatch:      return "DimensionMismatch";
        case ErrorCode::ZeroNormal:             return "ZeroNormal";
        case ErrorCode::NonFiniteEntry:         return "NonFiniteEntry";
        case ErrorCode::IndexOutOfRange:        return "IndexOutOfRange";
        case ErrorCode::EmptyPolyhedron:        return "EmptyPolyhedron";
        case ErrorCode::LpNumericalFailure:     return "LpNumericalFailure";
        case ErrorCode::SingularGram:           return "SingularGram";
        case ErrorCode::NotOnHyperplane:        return "NotOnHyperplane";
        case ErrorCode::UnboundedPolyhedron:    return "UnboundedPolyhedron";
        case ErrorCode::GeneralPositionFailure: return "GeneralPositionFailure";
        case ErrorCode::NotSquare:              return "NotSquare";
        case ErrorCode::SingularNormals:        return "SingularNormals";
        case ErrorCode::ZeroDiagonal:           return "ZeroDiagonal";
        case ErrorCode::StepUnderflow:          return "StepUnderflow";
        case ErrorCode::MaxStepsExceeded:       return "MaxStepsExceeded";
        case ErrorCode::NoApplicableMethod:     return "NoApplicableMethod";
        case ErrorCode::DimensionTooLarge:      return "DimensionTooLarge";
        case ErrorCode::InvalidConfig:          return "InvalidConfig";
        case ErrorCode::ParseError:             return "ParseError";
    }
    return "UnknownError";
}

/// Library-wide exception; the code distinguishes failure classes that
/// callers (and the CLI exit-code mapping) need to tell apart.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace polyprob
